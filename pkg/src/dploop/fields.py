"""Wave fields q(y,t), u(y,t), the coordinate map x(y,t), and frame sampling.

Everything is assembled from closed-form coefficient tables:

    q = kappa * g1 g2 / ftilde        u = kappa^3 * h / (g1 g2)

with g1, g2 the factor polynomials of the perfect-square numerator of
q^2 and h the interaction numerator.  The h table carries the four
single-mode-limit terms plus one cross term e^{xi1+xi2}; the cross
coefficient is pinned at assembly time by the exact identity

    h * ftilde = G^2 - G*ftilde - (G G_ty - G_t G_y)/kappa^2,  G = g1 g2,

which follows from u = -q (ln q)_ty + q^3 - kappa^3 and
(ln ftilde)_ty = kappa^2 - q^2.  The assembled tables are asserted
against the full identity coefficient-by-coefficient.

q is always evaluated from the factorized form, never as a square root
of kappa^2 - (ln f)_ty: the square root would destroy the sign of q,
and the negative-q stretch is exactly what folds x(y) into a loop.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

from .algebra import ExpPoly, PhaseSet, RationalExp
from .errors import MapSingularity, ParameterError, SingularIntegrand
from .modes import Regime, SolitonSpec
from .tau import TwoModeConstants, closed_form_tau, delta_nu, phase_set

IDENTITY_RTOL = 1e-9  # assembly-time consistency of the h table
SINGULAR_RTOL = 1e-12  # cancellation level that flags a frame singular


@dataclass(frozen=True)
class Perturbation:
    """Multiply one closed-form coefficient by (1 + rel); negative controls."""

    target: str  # one of f_tilde, g1, g2, h
    index: tuple[int, ...]
    rel: float

    def apply(self, poly: ExpPoly) -> ExpPoly:
        if self.index not in poly.terms:
            raise ParameterError(
                f"{self.target} has no coefficient at {self.index}; "
                f"available: {sorted(poly.terms)}"
            )
        terms = dict(poly.terms)
        terms[self.index] = terms[self.index] * (1.0 + self.rel)
        return ExpPoly(poly.phases, terms)


@dataclass(frozen=True)
class FieldSet:
    """Assembled solution fields for one SolitonSpec."""

    spec: SolitonSpec
    phases: PhaseSet
    consts: TwoModeConstants | None
    f: ExpPoly
    f_tilde: ExpPoly
    g1: ExpPoly
    g2: ExpPoly
    g: ExpPoly  # g1 * g2
    h: ExpPoly
    q: RationalExp  # kappa * g / f_tilde
    u: RationalExp  # kappa^3 * h / g
    perturb: Perturbation | None = None

    @property
    def kappa(self) -> float:
        return self.spec.kappa


def _mode_coefficients(kappa: float, k: float, a: float) -> tuple[float, float, float]:
    """(C1, C2, A) for one mode: g-factor slopes and the u-numerator weight."""
    kk = kappa * k
    c1 = (2.0 - kk) / (2.0 * a * (1.0 + kk))
    c2 = (2.0 + kk) / (2.0 * a * (1.0 - kk))
    amp = 9.0 * kappa**2 * k**2 / (a * (1.0 - kk * kk) ** 2)
    return c1, c2, amp


def _g_poly(phases: PhaseSet, delta: float, eps: tuple[int, ...], slopes: tuple[float, ...]) -> ExpPoly:
    if phases.n == 1:
        return ExpPoly(phases, {(0,): delta, (1,): eps[0] * slopes[0]})
    return ExpPoly(
        phases,
        {
            (0, 0): delta,
            (1, 0): eps[0] * slopes[0],
            (0, 1): eps[1] * slopes[1],
            (1, 1): eps[0] * eps[1] * slopes[0] * slopes[1],
        },
    )


def assemble_fields(spec: SolitonSpec, perturb: Perturbation | None = None) -> FieldSet:
    """Build all closed-form tables and rational fields for a spec.

    With ``perturb`` set, one coefficient is corrupted after assembly and
    the consistency assertion is skipped: the result is deliberately not
    a solution (negative-control route).
    """
    phases = phase_set(spec)
    derived = spec.derived()
    kappa = spec.kappa
    eps = tuple(m.epsilon for m in spec.modes)

    if spec.n == 2:
        consts = delta_nu(kappa, spec.modes[0].k, spec.modes[1].k)
        delta, nu = consts.delta, consts.nu
    else:
        consts = None
        delta, nu = 1.0, None

    per_mode = [
        _mode_coefficients(kappa, m.k, d.a) for m, d in zip(spec.modes, derived)
    ]
    c1s = tuple(pm[0] for pm in per_mode)
    c2s = tuple(pm[1] for pm in per_mode)
    amps = tuple(pm[2] for pm in per_mode)

    g1 = _g_poly(phases, delta, eps, c1s)
    g2 = _g_poly(phases, delta, eps, c2s)

    if spec.n == 1:
        a = derived[0].a
        f_tilde = ExpPoly(phases, {(0,): 1.0, (1,): 2.0 * eps[0] / a, (2,): 1.0})
        h = ExpPoly(phases, {(1,): eps[0] * amps[0]})
    else:
        a1, a2 = derived[0].a, derived[1].a
        f_tilde = ExpPoly(
            phases,
            {
                (0, 0): delta * delta,
                (1, 0): 2.0 * eps[0] * delta / a1,
                (0, 1): 2.0 * eps[1] * delta / a2,
                (2, 0): 1.0,
                (0, 2): 1.0,
                (1, 1): 2.0 * eps[0] * eps[1] * nu / (a1 * a2),
                (2, 1): 2.0 * eps[1] / a2,
                (1, 2): 2.0 * eps[0] / a1,
                (2, 2): 1.0,
            },
        )
        h = ExpPoly(
            phases,
            {
                (1, 0): eps[0] * amps[0] * delta,
                (0, 1): eps[1] * amps[1] * delta,
                (1, 2): eps[0] * amps[0],
                (2, 1): eps[1] * amps[1],
            },
        )

    g_full = g1 * g2
    rhs = _h_defining_rhs(g_full, f_tilde, kappa)
    if spec.n == 2:
        # cross-interaction coefficient from the defining identity
        short = rhs - h * f_tilde
        cross = short.terms.get((1, 1), 0.0) / f_tilde.terms[(0, 0)]
        h = h + ExpPoly.single(phases, (1, 1), cross)

    resid = h * f_tilde - rhs
    ref = max(abs(c) for c in rhs.terms.values())
    worst = max((abs(c) for c in resid.terms.values()), default=0.0)
    if perturb is None and worst > IDENTITY_RTOL * ref:
        raise ArithmeticError(
            f"u-numerator table violates its defining identity: {worst:g} vs scale {ref:g}"
        )

    if perturb is not None:
        tables = {"f_tilde": f_tilde, "g1": g1, "g2": g2, "h": h}
        if perturb.target not in tables:
            raise ParameterError(
                f"unknown perturbation target {perturb.target!r}; "
                f"choose from {sorted(tables)}"
            )
        tables[perturb.target] = perturb.apply(tables[perturb.target])
        f_tilde, g1, g2, h = (
            tables["f_tilde"],
            tables["g1"],
            tables["g2"],
            tables["h"],
        )
        g_full = g1 * g2

    return FieldSet(
        spec=spec,
        phases=phases,
        consts=consts,
        f=closed_form_tau(spec),
        f_tilde=f_tilde,
        g1=g1,
        g2=g2,
        g=g_full,
        h=h,
        q=RationalExp(kappa * g_full, f_tilde),
        u=RationalExp(kappa**3 * h, g_full),
        perturb=perturb,
    )


def _h_defining_rhs(g_full: ExpPoly, f_tilde: ExpPoly, kappa: float) -> ExpPoly:
    g_t = g_full.d_dt()
    g_ty = g_t.d_dy()
    return (
        g_full * g_full
        - g_full * f_tilde
        - (1.0 / kappa**2) * (g_full * g_ty - g_t * g_full.d_dy())
    )


def as_fields(source: SolitonSpec | FieldSet) -> FieldSet:
    return source if isinstance(source, FieldSet) else assemble_fields(source)


# ---------------------------------------------------------------------------
# coordinate map
# ---------------------------------------------------------------------------

def _alpha(a: float) -> float:
    """One-loop map constant; real and in (0, 1) throughout the loop band."""
    return np.sqrt((2 * a - 1) * (a + 1) / ((2 * a + 1) * (a - 1)))


def x_closed(source: SolitonSpec | FieldSet, y, t) -> np.ndarray | float:
    """Closed-form coordinate map x(y, t); dx/dy = 1/q.

    One loop mode: x = y/kappa + ln[(1+a1'+(1-a1') E)/(1-a1'+(1+a1') E)] + d
    with a1' the loop map constant (log-ratio orientation fixed by the
    dx/dy = 1/q identity).  Every other case: x = y/kappa + ln(g1/g2) + d.
    Raises MapSingularity where a log argument is non-positive.
    """
    fields = as_fields(source)
    spec = fields.spec
    scalar = np.isscalar(y)
    y_arr = np.atleast_1d(np.asarray(y, dtype=float))

    if spec.n == 1 and spec.derived()[0].regime is Regime.LOOP:
        alpha = _alpha(spec.derived()[0].a)
        xi = fields.phases.xi(y_arr, t)[0]
        num = np.logaddexp(np.log1p(alpha), np.log1p(-alpha) + xi)
        den = np.logaddexp(np.log1p(-alpha), np.log1p(alpha) + xi)
        x = y_arr / spec.kappa + (num - den) + spec.d
    else:
        xi = fields.phases.xi(y_arr, t)
        m1, _, s1 = fields.g1.eval_scaled(xi)
        m2, _, s2 = fields.g2.eval_scaled(xi)
        if np.any(m1 <= 0.0) or np.any(m2 <= 0.0):
            bad = int(np.argmax((m1 <= 0.0) | (m2 <= 0.0)))
            raise MapSingularity(
                f"non-positive map log argument at y={y_arr[bad]:g}, t={t:g}"
            )
        x = y_arr / spec.kappa + (np.log(m1) + s1) - (np.log(m2) + s2) + spec.d
    return float(x[0]) if scalar else x


def x_quadrature(
    source: SolitonSpec | FieldSet,
    y: float,
    t: float,
    xi_cutoff: float = 40.0,
) -> float:
    """Coordinate map by adaptive quadrature of 1/q - 1/kappa.

    The integrand decays exponentially in both directions (q -> kappa);
    the lower limit is truncated where every phase is below -xi_cutoff,
    which puts the integrand under 1e-14 for the admissible families.
    A sign scan of the q numerator over the integration range raises
    SingularIntegrand if q has a zero there.
    """
    fields = as_fields(source)
    spec = fields.spec
    derived = spec.derived()
    y_lo = min(
        m.y0 - d.c * t - xi_cutoff / m.k for m, d in zip(spec.modes, derived)
    )
    y_lo = min(y_lo, y)

    if y > y_lo:
        scan = np.linspace(y_lo, y, 4001)
        mant, _, _ = fields.g.eval_scaled(fields.phases.xi(scan, t))
        sign = np.sign(mant)
        if np.any(sign[:-1] * sign[1:] < 0):
            flip = int(np.argmax(sign[:-1] * sign[1:] < 0))
            raise SingularIntegrand(
                f"q has a zero near y={scan[flip]:g} at t={t:g}"
            )

    # 1/q - 1/kappa = (f_tilde - g) / (kappa g); background cancels exactly
    integrand_ratio = RationalExp(fields.f_tilde - fields.g, fields.g)

    def integrand(yy: float) -> float:
        return integrand_ratio.eval(yy, t) / spec.kappa

    centers = sorted(
        m.y0 - d.c * t for m, d in zip(spec.modes, derived) if y_lo < m.y0 - d.c * t < y
    )
    value, _ = quad(
        integrand, y_lo, y, points=centers or None, limit=200,
        epsabs=1e-13, epsrel=1e-12,
    )
    return y / spec.kappa + value + spec.d


# ---------------------------------------------------------------------------
# frames and features
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ParametricCurve:
    """One frame at fixed t: parallel arrays of (y, x, u, q) samples.

    ``loop_count`` is half the number of sign changes of q along y;
    ``singular`` flags catastrophic cancellation in the q numerator
    (never set for admissible parameter sets).
    """

    t: float
    y: np.ndarray
    x: np.ndarray
    u: np.ndarray
    q: np.ndarray
    loop_count: int
    singular: bool
    fields: FieldSet | None = field(default=None, repr=False, compare=False)

    @property
    def samples(self) -> list[tuple[float, float, float, float]]:
        return list(zip(self.y.tolist(), self.x.tolist(), self.u.tolist(), self.q.tolist()))


def sample_frame(
    source: SolitonSpec | FieldSet,
    t: float,
    y_min: float,
    y_max: float,
    n: int,
) -> ParametricCurve:
    """Sample a frame on a uniform y grid (parametric representation).

    u(x) is multivalued in loop regimes, so no resampling onto an x grid
    is attempted; consumers plot the polyline in sample order.
    """
    if n < 2:
        raise ValueError("need at least 2 samples")
    if not y_min < y_max:
        raise ValueError("empty y range")
    fields = as_fields(source)
    y = np.linspace(y_min, y_max, n)
    xi = fields.phases.xi(y, t)

    mant_g, amant_g, _ = fields.g.eval_scaled(xi)
    singular = bool(np.any(np.abs(mant_g) < SINGULAR_RTOL * amant_g))

    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        q_mant, q_scale = fields.q.eval_scaled(xi)
        q = q_mant * np.exp(q_scale)
        u_mant, u_scale = fields.u.eval_scaled(xi)
        u = u_mant * np.exp(u_scale)
    x = x_closed(fields, y, t)

    sign = np.sign(q)
    flips = int(np.sum(sign[:-1] * sign[1:] < 0))
    return ParametricCurve(
        t=float(t), y=y, x=x, u=u, q=q,
        loop_count=flips // 2, singular=singular, fields=fields,
    )


def _refine_extremum(fields: FieldSet, t: float, bracket, minimize=True):
    if minimize:
        func = lambda yy: fields.u.eval(yy, t)
    else:
        func = lambda yy: -fields.u.eval(yy, t)
    res = minimize_scalar(func, bracket=bracket, method="golden", options={"xtol": 1e-12})
    y_star = float(res.x)
    return y_star, fields.u.eval(y_star, t)


def trough_positions(curve: ParametricCurve) -> list[tuple[float, float]]:
    """Interior local minima of u along y, golden-section refined.

    Three-point strict comparison keeps flat (underflowed) tails from
    producing spurious minima; ties resolve to smaller y by scan order.
    """
    return _extrema(curve, minimize=True)


def crest_positions(curve: ParametricCurve) -> list[tuple[float, float]]:
    """Interior local maxima of u along y (smooth-mode crests)."""
    return _extrema(curve, minimize=False)


def _extrema(curve: ParametricCurve, minimize: bool) -> list[tuple[float, float]]:
    u = curve.u if minimize else -curve.u
    y = curve.y
    out = []
    for i in range(1, len(y) - 1):
        if u[i] < u[i - 1] and u[i] < u[i + 1]:
            if curve.fields is not None:
                y_star, u_star = _refine_extremum(
                    curve.fields, curve.t, (y[i - 1], y[i], y[i + 1]), minimize
                )
            else:
                y_star, u_star = float(y[i]), float(curve.u[i])
            out.append((y_star, u_star))
    return out
