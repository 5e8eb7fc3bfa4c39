"""Numeric kernels: compiled fast path with a NumPy fallback.

Two operations dominate runtime: evaluating exponential-polynomial term
tables over batches of probe points, and scanning determinants of the
small tau matrices.  Both exist twice, in `_fast` (Cython) and `_ref`
(NumPy), with identical semantics; the compiled module is preferred at
import time when present.  Set the environment variable ``DPLOOP_PURE=1``
to force the NumPy implementation (used by the benchmark and tests).
"""
import os

if os.environ.get("DPLOOP_PURE"):
    from . import _ref as _impl

    BACKEND = "python"
else:
    try:
        from . import _fast as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _ref as _impl

        BACKEND = "python"

eval_terms = _impl.eval_terms
det_scaled = _impl.det_scaled

__all__ = ["BACKEND", "eval_terms", "det_scaled"]
