"""NumPy reference implementation of the numeric kernels.

This module defines the semantics; `_fast.pyx` mirrors it in Cython.
All values with exponential dynamic range are returned in scaled form
``value = mant * exp(scale)`` so that nothing overflows until a caller
explicitly combines mantissas and scales.
"""
import numpy as np


def eval_terms(midx, coeffs, xi):
    """Evaluate a term table sum_t c_t * exp(midx[t] . xi[:, p]) per probe.

    Parameters
    ----------
    midx : (T, N) float64, non-negative integer multi-indices
    coeffs : (T,) float64
    xi : (N, P) float64, phase values per mode and probe

    Returns
    -------
    mant, amant, scale : (P,) float64 arrays.  The value at probe p is
    ``mant[p] * exp(scale[p])``; ``amant`` accumulates |c_t| instead of
    c_t and serves as a cancellation diagnostic.
    """
    n_probe = xi.shape[1]
    if midx.shape[0] == 0:
        zero = np.zeros(n_probe)
        return zero, zero.copy(), zero.copy()
    expo = midx @ xi  # (T, P)
    scale = expo.max(axis=0)
    weights = np.exp(expo - scale[None, :])
    return coeffs @ weights, np.abs(coeffs) @ weights, scale


def det_scaled(cmat, gdiag, eta):
    """Scaled determinant of A_p = cmat + diag(gdiag * exp(eta[:, p])).

    Every row i is rescaled by exp(-max(0, eta[i] + log|gdiag[i]|)) so the
    working matrix stays O(1) even when the diagonal exponentials overflow
    a double; the pulled-out factors accumulate into the scale.  The LU
    factorization uses partial pivoting (LAPACK via slogdet).

    Returns
    -------
    mant : (P,) complex128, scale : (P,) float64 with det = mant*exp(scale).
    """
    n_dim, n_probe = eta.shape
    lw = np.maximum(0.0, eta + np.log(np.abs(gdiag))[:, None])  # (M, P)
    work = np.exp(-lw.T)[:, :, None] * cmat[None, :, :]
    work = work.astype(np.complex128, copy=False)
    diag = np.arange(n_dim)
    work[:, diag, diag] += gdiag[None, :] * np.exp(eta.T - lw.T)
    sign, logabs = np.linalg.slogdet(work)
    mant = sign * np.exp(logabs)
    mant[logabs == -np.inf] = 0.0
    return mant, lw.sum(axis=0)
