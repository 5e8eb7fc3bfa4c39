"""Exact algebra over finite sums of exponentials of travelling-wave phases.

The phase variables are xi_j = k_j (y + c_j t - y0_j).  An ExpPoly is a
finite sum  sum_m c_m exp(m . xi)  with non-negative integer multi-indices
m; the family is closed under +, *, d/dy and d/dt, so every identity the
verifier checks can be formed exactly and only floating-point rounding
remains.  Quotients live in RationalExp and are never divided out.

Evaluation is done in scaled form (mantissa, exp-scale) so that frames at
|t| up to 100 do not overflow; a quotient combines the scales of its
numerator and denominator before exponentiating.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import eval_terms
from .errors import PhaseMismatch

# Coefficients below this magnitude are dropped: true underflow only.
# Symbolic cancellation is never assumed; rounding residues survive.
PRUNE = 1e-300


@dataclass(frozen=True)
class PhaseSet:
    """Per-mode phase data (k_j, c_j, y0_j) shared by a family of ExpPoly."""

    k: tuple[float, ...]
    c: tuple[float, ...]
    y0: tuple[float, ...]

    def __post_init__(self):
        if not (len(self.k) == len(self.c) == len(self.y0)):
            raise ValueError("k, c, y0 must have equal lengths")

    @property
    def n(self) -> int:
        return len(self.k)

    def xi(self, y, t):
        """Phase values, shape (n, P); y and t broadcast against each other."""
        y = np.atleast_1d(np.asarray(y, dtype=float))
        t = np.asarray(t, dtype=float)
        k = np.array(self.k)[:, None]
        c = np.array(self.c)[:, None]
        y0 = np.array(self.y0)[:, None]
        return k * (y[None, :] + c * t - y0)


class ExpPoly:
    """Immutable sparse exponential polynomial over a PhaseSet.

    Terms map integer multi-indices (tuples of length phases.n) to real
    coefficients.  The zero polynomial is the empty mapping.  Complex
    coefficients are allowed transiently (determinant expansion with
    conjugate-pair parameters) but cannot be evaluated; call
    `real_checked` first.
    """

    __slots__ = ("phases", "terms", "_midx", "_coef")

    def __init__(self, phases: PhaseSet, terms: dict | None = None):
        object.__setattr__(self, "phases", phases)
        clean = {}
        for m, coef in (terms or {}).items():
            if len(m) != phases.n:
                raise ValueError(f"multi-index {m} does not match {phases.n} modes")
            if abs(coef) > PRUNE:
                clean[tuple(int(x) for x in m)] = coef
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "_midx", None)
        object.__setattr__(self, "_coef", None)

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls, phases: PhaseSet) -> "ExpPoly":
        return cls(phases, {})

    @classmethod
    def constant(cls, phases: PhaseSet, value) -> "ExpPoly":
        return cls(phases, {(0,) * phases.n: value})

    @classmethod
    def single(cls, phases: PhaseSet, midx, coef) -> "ExpPoly":
        return cls(phases, {tuple(midx): coef})

    # -- bookkeeping ----------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def has_complex(self) -> bool:
        return any(isinstance(c, complex) for c in self.terms.values())

    def real_checked(self, tol: float = 1e-12) -> "ExpPoly":
        """Drop imaginary parts, asserting they are rounding residue.

        Tolerance is |imag| <= tol * max(1, |real|) per coefficient.
        """
        out = {}
        for m, coef in self.terms.items():
            coef = complex(coef)
            if abs(coef.imag) > tol * max(1.0, abs(coef.real)):
                raise ValueError(
                    f"coefficient {m} has non-negligible imaginary part {coef.imag:g}"
                )
            out[m] = coef.real
        return ExpPoly(self.phases, out)

    def _check(self, other: "ExpPoly"):
        if self.phases != other.phases:
            raise PhaseMismatch("operands built over different phase sets")

    def __repr__(self):
        body = " + ".join(
            f"{coef:g}*E{list(m)}" for m, coef in sorted(self.terms.items())
        )
        return f"ExpPoly({body or '0'})"

    def __eq__(self, other):
        return (
            isinstance(other, ExpPoly)
            and self.phases == other.phases
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.phases, tuple(sorted(self.terms.items()))))

    # -- ring operations ------------------------------------------------
    def __add__(self, other: "ExpPoly") -> "ExpPoly":
        self._check(other)
        out = dict(self.terms)
        for m, coef in other.terms.items():
            out[m] = out.get(m, 0.0) + coef
        return ExpPoly(self.phases, out)

    def __neg__(self) -> "ExpPoly":
        return ExpPoly(self.phases, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "ExpPoly") -> "ExpPoly":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, ExpPoly):
            self._check(other)
            out = {}
            for m1, c1 in self.terms.items():
                for m2, c2 in other.terms.items():
                    key = tuple(a + b for a, b in zip(m1, m2))
                    out[key] = out.get(key, 0.0) + c1 * c2
            return ExpPoly(self.phases, out)
        return ExpPoly(self.phases, {m: c * other for m, c in self.terms.items()})

    def __rmul__(self, other):
        return self.__mul__(other)

    # -- calculus ---------------------------------------------------------
    def d_dy(self) -> "ExpPoly":
        """Term-wise multiplication by sum_j m_j k_j; exact."""
        k = self.phases.k
        return ExpPoly(
            self.phases,
            {m: c * sum(mj * kj for mj, kj in zip(m, k)) for m, c in self.terms.items()},
        )

    def d_dt(self) -> "ExpPoly":
        """Term-wise multiplication by sum_j m_j k_j c_j; exact."""
        k, cs = self.phases.k, self.phases.c
        return ExpPoly(
            self.phases,
            {
                m: c * sum(mj * kj * cj for mj, kj, cj in zip(m, k, cs))
                for m, c in self.terms.items()
            },
        )

    # -- evaluation ---------------------------------------------------------
    def _arrays(self):
        if self._midx is None:
            if self.has_complex:
                raise TypeError("cannot evaluate an ExpPoly with complex coefficients")
            keys = sorted(self.terms)  # deterministic summation order
            midx = np.array(keys, dtype=float).reshape(len(keys), self.phases.n)
            coef = np.array([self.terms[m] for m in keys], dtype=float)
            object.__setattr__(self, "_midx", np.ascontiguousarray(midx))
            object.__setattr__(self, "_coef", np.ascontiguousarray(coef))
        return self._midx, self._coef

    def eval_scaled(self, xi):
        """(mant, amant, scale) at phase values xi of shape (n, P)."""
        midx, coef = self._arrays()
        return eval_terms(midx, coef, np.ascontiguousarray(xi, dtype=float))

    def eval(self, y, t):
        """Plain values; overflows to inf only when the value itself does."""
        scalar = np.isscalar(y) and np.isscalar(t)
        mant, _, scale = self.eval_scaled(self.phases.xi(y, t))
        with np.errstate(over="ignore"):
            out = mant * np.exp(scale)
        return float(out[0]) if scalar else out


class RationalExp:
    """Quotient of ExpPoly values; the home of q, u and (ln f)_ty.

    No polynomial division is ever performed: derivatives and products
    stay in quotient form, which is closed and exact.  The denominator is
    kept as a tuple of factors and evaluated factor-by-factor in scaled
    space: a flat expansion of, say, (N D)^2 cancels catastrophically
    near a simple zero of D, while the factored product only loses the
    one factor's cancellation.
    """

    __slots__ = ("num", "den_factors", "_den_flat")

    def __init__(self, num: ExpPoly, den: "ExpPoly | tuple[ExpPoly, ...]"):
        factors = (den,) if isinstance(den, ExpPoly) else tuple(den)
        if not factors:
            raise ValueError("need at least one denominator factor")
        for f in factors:
            if f.is_zero:
                raise ZeroDivisionError("zero denominator polynomial")
            num._check(f)
        self.num = num
        self.den_factors = factors
        self._den_flat = None

    @property
    def phases(self) -> PhaseSet:
        return self.num.phases

    @property
    def den(self) -> ExpPoly:
        """The expanded denominator (cached); used for differentiation."""
        if self._den_flat is None:
            flat = self.den_factors[0]
            for f in self.den_factors[1:]:
                flat = flat * f
            self._den_flat = flat
        return self._den_flat

    def __repr__(self):
        return f"RationalExp({self.num!r} / {len(self.den_factors)} factors)"

    def eval_scaled(self, xi):
        """(mant, scale) with value = mant * exp(scale); scales combined."""
        mant, _, scale = self.num.eval_scaled(xi)
        mant = mant.copy()
        for f in self.den_factors:
            mf, _, sf = f.eval_scaled(xi)
            with np.errstate(divide="ignore", invalid="ignore"):
                mant /= mf
            scale = scale - sf
        return mant, scale

    def eval(self, y, t):
        scalar = np.isscalar(y) and np.isscalar(t)
        mant, scale = self.eval_scaled(self.phases.xi(y, t))
        with np.errstate(over="ignore"):
            out = mant * np.exp(scale)
        return float(out[0]) if scalar else out

    def d_dy(self) -> "RationalExp":
        den = self.den
        return RationalExp(
            self.num.d_dy() * den - self.num * den.d_dy(),
            self.den_factors + self.den_factors,
        )

    def d_dt(self) -> "RationalExp":
        den = self.den
        return RationalExp(
            self.num.d_dt() * den - self.num * den.d_dt(),
            self.den_factors + self.den_factors,
        )

    def __mul__(self, other):
        if isinstance(other, RationalExp):
            return RationalExp(
                self.num * other.num, self.den_factors + other.den_factors
            )
        return RationalExp(self.num * other, self.den_factors)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __neg__(self):
        return RationalExp(-self.num, self.den_factors)


def log_mixed_derivative(f: ExpPoly) -> RationalExp:
    """(ln f)_ty as the exact quotient (f f_ty - f_t f_y) / f^2."""
    if f.is_zero:
        raise ZeroDivisionError("log of the zero polynomial")
    f_t = f.d_dt()
    return RationalExp(f * f_t.d_dy() - f_t * f.d_dy(), (f, f))


def rational_mixed_log_derivative(r: RationalExp) -> RationalExp:
    """(ln r)_ty over a common denominator.

    Equals log_mixed_derivative(num) - log_mixed_derivative(den) combined
    into the single quotient (P_N D^2 - P_D N^2) / (N^2 D^2) with
    P_X = X X_ty - X_t X_y.
    """
    num, den = r.num, r.den
    if num.is_zero:
        raise ZeroDivisionError("log of the zero polynomial")
    p_num = log_mixed_derivative(num)
    p_den = log_mixed_derivative(den)
    return RationalExp(
        p_num.num * (den * den) - p_den.num * (num * num),
        (num, num, den, den),
    )
