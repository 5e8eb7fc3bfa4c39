"""Exponential-polynomial algebra: exactness, calculus, scaled evaluation."""
from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dploop.algebra import (
    ExpPoly,
    PhaseSet,
    RationalExp,
    log_mixed_derivative,
    rational_mixed_log_derivative,
)
from dploop.errors import PhaseMismatch

ONE_MODE = PhaseSet(k=(2.1,), c=(1.0129609556975162,), y0=(0.0,))
TWO_MODE = PhaseSet(k=(3.2, 3.8), c=(0.689089382,  0.482296919), y0=(0.0, 0.0))


def poly(phases, mapping):
    return ExpPoly(phases, mapping)


@st.composite
def small_polys(draw, phases=ONE_MODE, max_order=3):
    n_terms = draw(st.integers(min_value=0, max_value=4))
    terms = {}
    for _ in range(n_terms):
        m = tuple(
            draw(st.integers(min_value=0, max_value=max_order)) for _ in range(phases.n)
        )
        terms[m] = draw(
            st.floats(min_value=-5, max_value=5).filter(lambda x: abs(x) > 1e-3)
        )
    return poly(phases, terms)


class TestEvaluation:
    def test_zero_poly(self):
        assert ExpPoly.zero(ONE_MODE).eval(0.3, -7.0) == 0.0

    def test_unit_terms_at_origin(self):
        p = poly(ONE_MODE, {(0,): 1.0, (1,): 1.0})
        assert p.eval(0.0, 0.0) == pytest.approx(2.0, rel=1e-15)

    def test_one_loop_tau_shape_at_origin(self):
        # coefficient table {a^2, -2a, a^2} evaluated where the phase is 0
        a = 0.277549111644739
        p = poly(ONE_MODE, {(0,): a * a, (1,): -2 * a, (2,): a * a})
        assert p.eval(0.0, 0.0) == pytest.approx(2 * a * a - 2 * a, rel=1e-14)

    @given(small_polys(), st.floats(-5, 5), st.floats(-3, 3))
    @settings(max_examples=150)
    def test_scaled_matches_naive(self, p, y, t):
        """Max-exponent rescaling only changes the rounding path."""
        naive = sum(
            c * np.exp(sum(m_j * xi_j for m_j, xi_j in zip(m, p.phases.xi(y, t)[:, 0])))
            for m, c in p.terms.items()
        )
        if not np.isfinite(naive):
            return
        got = p.eval(y, t)
        assert got == pytest.approx(naive, rel=1e-12, abs=1e-300)

    def test_large_time_frames_do_not_overflow_ratio(self):
        # quotient evaluation combines scales first; |t| = 100 stays finite
        num = poly(ONE_MODE, {(1,): 3.0, (2,): 1.0})
        den = poly(ONE_MODE, {(0,): 1.0, (2,): 1.0})
        r = RationalExp(num, den)
        value = r.eval(100.0, 100.0)
        assert np.isfinite(value)
        # while the numerator alone genuinely overflows a double
        assert num.eval(100.0, 100.0) == np.inf


class TestRingOps:
    def test_mul_zero(self):
        p = poly(ONE_MODE, {(1,): 2.0})
        assert (p * ExpPoly.zero(ONE_MODE)).is_zero

    def test_exponent_addition(self):
        p = poly(ONE_MODE, {(1,): 1.0})
        assert (p * p).terms == {(2,): 1.0}

    def test_difference_of_squares(self):
        a = 0.3
        lo = poly(ONE_MODE, {(0,): 1.0, (1,): -a})
        hi = poly(ONE_MODE, {(0,): 1.0, (1,): +a})
        assert (lo * hi).terms == pytest.approx({(0,): 1.0, (2,): -a * a})

    def test_phase_mismatch_rejected(self):
        p = poly(ONE_MODE, {(1,): 1.0})
        q = poly(PhaseSet(k=(2.0,), c=(1.0,), y0=(0.0,)), {(1,): 1.0})
        with pytest.raises(PhaseMismatch):
            _ = p + q

    def test_exact_zero_coefficients_are_dropped(self):
        p = poly(ONE_MODE, {(1,): 2.5})
        assert (p - p).is_zero

    @given(small_polys(), small_polys())
    @settings(max_examples=150)
    def test_product_rule(self, a, b):
        lhs = (a * b).d_dy()
        rhs = a.d_dy() * b + a * b.d_dy()
        keys = set(lhs.terms) | set(rhs.terms)
        for m in keys:
            x, z = lhs.terms.get(m, 0.0), rhs.terms.get(m, 0.0)
            assert x == pytest.approx(z, rel=1e-13, abs=1e-280)


class TestCalculus:
    def test_d_dy_single_term(self):
        p = poly(ONE_MODE, {(1,): 1.0})
        assert p.d_dy().terms == {(1,): ONE_MODE.k[0]}

    def test_d_dt_single_term(self):
        p = poly(ONE_MODE, {(1,): 1.0})
        assert p.d_dt().terms == {(1,): ONE_MODE.k[0] * ONE_MODE.c[0]}

    def test_derivative_of_constant_vanishes(self):
        assert ExpPoly.constant(ONE_MODE, 4.2).d_dy().is_zero

    @given(small_polys(TWO_MODE))
    @settings(max_examples=150)
    def test_mixed_partials_commute(self, p):
        """Same term set; coefficients agree to the last ulp (the two
        composition orders associate the scalar products differently)."""
        ab = p.d_dy().d_dt().terms
        ba = p.d_dt().d_dy().terms
        assert set(ab) == set(ba)
        for m, c in ab.items():
            assert c == pytest.approx(ba[m], rel=4e-16)


class TestLogMixedDerivative:
    def test_constant_gives_zero(self):
        r = log_mixed_derivative(ExpPoly.constant(ONE_MODE, 3.0))
        assert r.num.is_zero

    def test_pure_exponential_gives_zero(self):
        # ln of a single exponential is linear in y and t
        r = log_mixed_derivative(poly(ONE_MODE, {(1,): 1.0}))
        assert r.num.is_zero

    def test_scaled_exponential_numerator_is_rounding_residue(self):
        # a general single term cancels up to one ulp of the products
        f = poly(ONE_MODE, {(2,): 5.0})
        r = log_mixed_derivative(f)
        scale = max(abs(c) for c in (f * f.d_dt().d_dy()).terms.values())
        residue = max((abs(c) for c in r.num.terms.values()), default=0.0)
        assert residue <= 1e-15 * scale

    def test_single_soliton_structure(self):
        # f = 1 + e^xi  ->  (ln f)_ty = k^2 c e^xi / (1 + e^xi)^2
        k, c = ONE_MODE.k[0], ONE_MODE.c[0]
        f = poly(ONE_MODE, {(0,): 1.0, (1,): 1.0})
        r = log_mixed_derivative(f)
        assert r.num.terms == pytest.approx({(1,): k * k * c})
        y = np.linspace(-3, 3, 11)
        got = r.eval(y, 0.7)
        e = np.exp(ONE_MODE.xi(y, 0.7)[0])
        assert got == pytest.approx(k * k * c * e / (1 + e) ** 2, rel=1e-13)

    def test_against_finite_differences(self):
        # the 4-point stencil at step 1e-5 carries ~2.5e-7 rounding noise,
        # so 1e-6 is the honest comparison level
        f = poly(ONE_MODE, {(0,): 1.0, (1,): 1.0})
        r = log_mixed_derivative(f)
        h = 1e-5
        for y, t in [(0.2, 0.1), (-1.0, 0.5), (1.3, -0.4)]:
            ln = lambda yy, tt: np.log(f.eval(yy, tt))
            fd = (
                ln(y + h, t + h) - ln(y + h, t - h) - ln(y - h, t + h) + ln(y - h, t - h)
            ) / (4 * h * h)
            assert r.eval(y, t) == pytest.approx(fd, abs=1e-6)

    @given(
        st.dictionaries(
            st.tuples(st.integers(0, 2)),
            st.floats(min_value=0.1, max_value=5.0),
            max_size=4,
        ),
        st.floats(-1, 1),
        st.floats(-1, 1),
    )
    @settings(max_examples=100)
    def test_randomized_fd_oracle(self, mapping, y, t):
        # positive coefficients keep f away from zeros, where ln-FD is
        # sound; step 3e-5 balances the eps/h^2 noise floor of the
        # 4-point stencil against its h^2 truncation
        p = poly(ONE_MODE, mapping) + ExpPoly.constant(ONE_MODE, 1.0)
        r = log_mixed_derivative(p)
        h = 3e-5
        ln = lambda yy, tt: np.log(p.eval(yy, tt))
        fd = (
            ln(y + h, t + h) - ln(y + h, t - h) - ln(y - h, t + h) + ln(y - h, t - h)
        ) / (4 * h * h)
        assert r.eval(y, t) == pytest.approx(fd, abs=1e-6)


class TestRationalMixedLogDerivative:
    def test_equal_num_den_gives_zero_values(self):
        p = poly(ONE_MODE, {(0,): 1.0, (1,): 0.5})
        r = rational_mixed_log_derivative(RationalExp(p, p))
        y = np.linspace(-2, 2, 9)
        assert np.max(np.abs(r.eval(y, 0.3))) < 1e-14

    def test_unit_denominator_matches_poly_route(self):
        p = poly(ONE_MODE, {(0,): 1.0, (1,): 1.0})
        r1 = rational_mixed_log_derivative(
            RationalExp(p, ExpPoly.constant(ONE_MODE, 1.0))
        )
        r2 = log_mixed_derivative(p)
        y = np.linspace(-3, 3, 13)
        assert r1.eval(y, -0.8) == pytest.approx(r2.eval(y, -0.8), rel=1e-12)

    def test_two_mode_quotient_against_fd(self, preset_fields):
        """(ln q)_ty for the two-loop overtaking scenario vs a stencil.

        A pure 4-point stencil on ln q cannot beat its eps/h^2 noise
        floor at 1e-6, so the oracle differences (ln q)_y = q_y/q, which
        evaluates exactly, across t.  The t-derivative is the part under
        test here; the y-derivative route has its own stencil test.
        """
        fields = preset_fields["fig2"]
        r = rational_mixed_log_derivative(fields.q)
        rng = np.random.default_rng(7)
        h = 1e-5
        q, q_y = fields.q, fields.q.d_dy()
        checked = 0
        while checked < 100:
            y, t = rng.uniform(-6, 6), rng.uniform(-4, 4)
            qc = q.eval(y, t)
            if not (0.05 < abs(qc) / fields.kappa < 8.0):
                continue
            fd = (
                q_y.eval(y, t + h) / q.eval(y, t + h)
                - q_y.eval(y, t - h) / q.eval(y, t - h)
            ) / (2 * h)
            # (ln q)_ty grows near the loop poles; the stencil noise
            # scales with it, hence the relative term
            assert r.eval(y, t) == pytest.approx(fd, rel=2e-8, abs=1e-6)
            checked += 1


class TestRationalExp:
    def test_zero_denominator_rejected(self):
        p = poly(ONE_MODE, {(0,): 1.0})
        with pytest.raises(ZeroDivisionError):
            RationalExp(p, ExpPoly.zero(ONE_MODE))

    def test_quotient_derivative_matches_fd(self):
        num = poly(ONE_MODE, {(0,): 1.0, (1,): -0.4})
        den = poly(ONE_MODE, {(0,): 2.0, (1,): 1.0})
        r = RationalExp(num, den)
        dy = r.d_dy()
        h = 1e-6
        for y in (-1.0, 0.0, 2.0):
            fd = (r.eval(y + h, 0.3) - r.eval(y - h, 0.3)) / (2 * h)
            assert dy.eval(y, 0.3) == pytest.approx(fd, rel=1e-8, abs=1e-10)

    def test_factored_denominator_evaluation(self):
        a = poly(ONE_MODE, {(0,): 1.0, (1,): 1.0})
        b = poly(ONE_MODE, {(0,): 2.0, (1,): -0.5})
        r = RationalExp(a * a, (a, b))
        y = np.linspace(-2, 2, 9)
        expect = a.eval(y, 0.1) / b.eval(y, 0.1)
        assert r.eval(y, 0.1) == pytest.approx(expect, rel=1e-13)
