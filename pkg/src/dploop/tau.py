"""The tau function three independent ways.

The 2N x 2N matrix A has diagonal 1 + eps_j a_j e^{xi_j} (two rows per
mode) and constant off-diagonal entries (pt_r - qt_r)/(pt_r - qt_s)
built from the amplitude parameters.  The determinant f = det A is
computed numerically (scaled partial-pivot elimination per probe),
symbolically (cofactor expansion over ExpPoly entries) and from the
expanded closed-form coefficient table, so each route can serve as an
oracle for the others.

Phase convention: xi_j = k_j (y + c_j t - y0_j) carries no log(a_j)
shift; a_j always appears as an explicit coefficient.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import det_scaled
from .algebra import ExpPoly, PhaseSet
from .errors import DegenerateDelta
from .modes import SolitonSpec

IMAG_TOL = 1e-12


@dataclass(frozen=True)
class TwoModeConstants:
    """Interaction constants of the two-mode tau function."""

    delta: float
    nu: float


def delta_nu(kappa: float, k1: float, k2: float) -> TwoModeConstants:
    """delta and nu; delta vanishes iff k1 = k2 (rejected upstream)."""
    s_plus = kappa**2 * (k1**2 + k1 * k2 + k2**2) - 3.0
    if s_plus == 0.0:
        raise DegenerateDelta(
            f"kappa^2 (k1^2 + k1 k2 + k2^2) = 3 for kappa={kappa}, k1={k1}, k2={k2}"
        )
    s_minus = kappa**2 * (k1**2 - k1 * k2 + k2**2) - 3.0
    den = (k1 + k2) ** 2 * s_plus
    delta = (k1 - k2) ** 2 * s_minus / den
    nu = ((2 * k1**4 - k1**2 * k2**2 + 2 * k2**4) * kappa**2 - 6 * (k1**2 + k2**2)) / den
    return TwoModeConstants(delta=delta, nu=nu)


def phase_set(spec: SolitonSpec) -> PhaseSet:
    derived = spec.derived()
    return PhaseSet(
        k=tuple(m.k for m in spec.modes),
        c=tuple(d.c for d in derived),
        y0=tuple(m.y0 for m in spec.modes),
    )


@dataclass(frozen=True)
class TauMatrix:
    """The 2N x 2N matrix in split form.

    ``constant`` holds the exponential-free part (identity plus the
    off-diagonal couplings, complex for loop modes whose amplitude
    parameters are a conjugate pair); ``gdiag[r] = eps_j a_j`` and
    ``row_mode[r]`` give the diagonal exponential of row r.  ``entries``
    is the same matrix as degree <= 1 ExpPoly values.
    """

    phases: PhaseSet
    constant: np.ndarray
    gdiag: np.ndarray
    row_mode: tuple[int, ...]
    entries: tuple[tuple[ExpPoly, ...], ...]


def build_matrix(spec: SolitonSpec) -> TauMatrix:
    derived = spec.derived()
    phases = phase_set(spec)
    size = 2 * spec.n

    pt = np.empty(size, dtype=complex)
    qt = np.empty(size, dtype=complex)
    for j, der in enumerate(derived):
        pt[2 * j] = der.q_amp
        qt[2 * j] = -der.p
        pt[2 * j + 1] = der.p
        qt[2 * j + 1] = -der.q_amp

    constant = np.eye(size, dtype=complex)
    for r in range(size):
        for s in range(size):
            if r != s:
                constant[r, s] = (pt[r] - qt[r]) / (pt[r] - qt[s])

    row_mode = tuple(r // 2 for r in range(size))
    gdiag = np.array(
        [spec.modes[j].epsilon * derived[j].a for j in row_mode], dtype=complex
    )

    entries = []
    for r in range(size):
        row = []
        for s in range(size):
            if r == s:
                midx = tuple(1 if j == row_mode[r] else 0 for j in range(spec.n))
                row.append(ExpPoly(phases, {(0,) * spec.n: 1.0, midx: gdiag[r]}))
            else:
                row.append(ExpPoly.constant(phases, constant[r, s]))
        entries.append(tuple(row))
    return TauMatrix(
        phases=phases,
        constant=constant,
        gdiag=gdiag,
        row_mode=row_mode,
        entries=tuple(entries),
    )


def _cofactor_det(rows: list[list[ExpPoly]]) -> ExpPoly:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    phases = rows[0][0].phases
    total = ExpPoly.zero(phases)
    for col in range(n):
        minor = [[row[c] for c in range(n) if c != col] for row in rows[1:]]
        term = rows[0][col] * _cofactor_det(minor)
        total = total + term if col % 2 == 0 else total - term
    return total


def det_symbolic(spec: SolitonSpec) -> ExpPoly:
    """Exact cofactor expansion of the tau matrix into an ExpPoly.

    Conjugate-pair amplitude parameters make individual entries complex;
    the expanded coefficients must be real up to rounding and are checked
    before the imaginary parts are dropped.  Close wavenumbers push the
    constant coefficient (a1 a2 delta)^2 many orders below the individual
    cofactor products, so the expansion runs in extended precision and
    each coefficient is rounded to a double once, at the end.
    """
    import mpmath as mp

    phases = phase_set(spec)
    size = 2 * spec.n
    with mp.workdps(30):
        kappa = mp.mpf(spec.kappa)
        pt: list = []
        qt: list = []
        gd: list = []
        for mode in spec.modes:
            k = mp.mpf(mode.k)
            root = mp.sqrt((1 - (kappa * k) ** 2 / 4) / 3)  # mpc above the loop band
            p = k / 2 * (1 + 2 / (kappa * k) * root)
            q = k / 2 * (1 - 2 / (kappa * k) * root)
            pt += [q, p]
            qt += [-p, -q]
            a = mp.sqrt((1 - (kappa * k) ** 2 / 4) / (1 - (kappa * k) ** 2))
            gd += [mode.epsilon * a, mode.epsilon * a]
        rows = []
        for r in range(size):
            row = []
            for s in range(size):
                if r == s:
                    midx = tuple(1 if j == r // 2 else 0 for j in range(spec.n))
                    row.append(
                        ExpPoly(phases, {(0,) * spec.n: mp.mpf(1), midx: gd[r]})
                    )
                else:
                    row.append(
                        ExpPoly.constant(phases, (pt[r] - qt[r]) / (pt[r] - qt[s]))
                    )
            rows.append(row)
        raw = _cofactor_det(rows)
        out = {}
        for m, coef in raw.terms.items():
            coef = mp.mpc(coef)
            if abs(coef.imag) > IMAG_TOL * max(1.0, abs(coef.real)):
                raise ValueError(
                    f"coefficient {m} has non-negligible imaginary part"
                )
            out[m] = float(coef.real)
    return ExpPoly(phases, out)


def det_numeric_scaled(spec: SolitonSpec, y, t):
    """Scaled determinant values: (mant, scale), det = mant * exp(scale).

    Partial-pivot elimination per probe with per-row rescaling, so large
    |t| frames cannot overflow the elimination.  The mantissa imaginary
    part is asserted to be rounding residue.
    """
    mat = build_matrix(spec)
    eta_full = mat.phases.xi(y, t)
    eta = np.ascontiguousarray(eta_full[list(mat.row_mode), :])
    mant, scale = det_scaled(mat.constant, mat.gdiag, eta)
    bad = np.abs(mant.imag) > IMAG_TOL * np.maximum(1.0, np.abs(mant.real))
    if bad.any():
        raise ValueError("determinant mantissa with non-negligible imaginary part")
    return mant.real, scale


def det_numeric(spec: SolitonSpec, y: float, t: float) -> float:
    """Plain determinant value at one probe point."""
    mant, scale = det_numeric_scaled(spec, [y], t)
    with np.errstate(over="ignore"):
        return float(mant[0] * np.exp(scale[0]))


def closed_form_tau(spec: SolitonSpec) -> ExpPoly:
    """The expanded tau-function coefficient table (overall a^2 factors included).

    One mode:  f = a^2 (1 + (2 eps/a) E + E^2).
    Two modes: f = (a1 a2)^2 times the nine-term table in delta, nu with
    each mode's exponential carrying its sign eps_j; flipping eps_j
    negates exactly the odd powers of e^{xi_j}.
    """
    phases = phase_set(spec)
    derived = spec.derived()
    if spec.n == 1:
        a = derived[0].a
        eps = spec.modes[0].epsilon
        return ExpPoly(phases, {(0,): a * a, (1,): 2.0 * eps * a, (2,): a * a})

    (m1, m2), (d1, d2) = spec.modes, derived
    a1, a2, e1, e2 = d1.a, d2.a, m1.epsilon, m2.epsilon
    consts = delta_nu(spec.kappa, m1.k, m2.k)
    delta, nu = consts.delta, consts.nu
    table = {
        (0, 0): delta * delta,
        (1, 0): 2.0 * e1 * delta / a1,
        (0, 1): 2.0 * e2 * delta / a2,
        (2, 0): 1.0,
        (0, 2): 1.0,
        (1, 1): 2.0 * e1 * e2 * nu / (a1 * a2),
        (2, 1): 2.0 * e2 / a2,
        (1, 2): 2.0 * e1 / a1,
        (2, 2): 1.0,
    }
    scale = (a1 * a2) ** 2
    return ExpPoly(phases, {m: scale * c for m, c in table.items()})
