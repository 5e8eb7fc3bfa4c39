"""Parameter validation, regime classification and derived quantities.

Frozen expected values come from 50-digit mpmath evaluation of the
defining expressions; the mpmath recomputation is kept inline where it
is cheap so the oracle stays visible.
"""
from __future__ import annotations

import math

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dploop.errors import (
    DegenerateModes,
    ImaginaryCoefficient,
    InvalidRegime,
    ParameterError,
    VelocityPole,
)
from dploop.modes import (
    ModeSpec,
    Regime,
    SolitonSpec,
    amplitude_pq,
    classify_mode,
    coefficient_a,
    velocity,
)

# admissible kappa*k products, avoiding the rejected band [1, 2]
loop_kk = st.floats(min_value=2.01, max_value=12.0)
smooth_kk = st.floats(min_value=0.01, max_value=0.99)
kappas = st.floats(min_value=0.05, max_value=10.0)


class TestVelocity:
    def test_simple_value(self):
        assert velocity(1.0, 2.0) == pytest.approx(1.0, abs=0)  # 3/(4-1)

    def test_frozen_loop_value(self):
        # mpmath: 3*1.1^4 / (1.1^2*2.1^2 - 1) = 1.0129609556975162...
        assert velocity(1.1, 2.1) == pytest.approx(1.0129609556975162, rel=1e-15)
        with mp.workdps(40):
            oracle = 3 * mp.mpf("1.1") ** 4 / (mp.mpf("1.1") ** 2 * mp.mpf("2.1") ** 2 - 1)
            assert velocity(1.1, 2.1) == pytest.approx(float(oracle), rel=1e-15)

    def test_pole(self):
        with pytest.raises(VelocityPole):
            velocity(1.0, 1.0)

    def test_sign_by_band(self):
        assert velocity(1.0, 2.5) > 0  # loop band
        assert velocity(1.0, 0.5) < 0  # smooth band

    @given(kappas, st.floats(min_value=0.05, max_value=12.0))
    @settings(max_examples=200)
    def test_defining_identity(self, kappa, k):
        if kappa * k == 1.0:
            return
        c = velocity(kappa, k)
        lhs = c * (kappa**2 * k**2 - 1.0)
        assert lhs == pytest.approx(3.0 * kappa**4, rel=1e-14)


class TestCoefficientA:
    def test_frozen_loop_value(self):
        # sqrt((1 - 5.3361/4)/(1 - 5.3361)) = 0.27754911164473899...
        assert coefficient_a(1.1, 2.1) == pytest.approx(0.277549111644739, rel=1e-14)

    def test_frozen_smooth_value(self):
        # sqrt(0.9375/0.75) = sqrt(1.25)
        assert coefficient_a(1.0, 0.5) == pytest.approx(math.sqrt(1.25), rel=1e-15)
        assert coefficient_a(1.0, 0.5) == pytest.approx(1.1180339887498949, rel=1e-15)

    @pytest.mark.parametrize("kappa,k", [(1.0, 2.0), (1.0, 1.0), (1.5, 1.0)])
    def test_rejected_band(self, kappa, k):
        with pytest.raises(ImaginaryCoefficient):
            coefficient_a(kappa, k)

    def test_band_ranges(self):
        assert 0.0 < coefficient_a(1.1, 2.1) < 0.5  # loop band sits below 1/2
        assert coefficient_a(0.91, 0.91) > 1.0  # smooth band above 1

    @given(kappas, loop_kk | smooth_kk)
    @settings(max_examples=200)
    def test_defining_identity(self, kappa, kk):
        k = kk / kappa
        a = coefficient_a(kappa, k)
        assert a * a * (1 - kk * kk) == pytest.approx(1 - kk * kk / 4, rel=1e-14)


class TestAmplitudePQ:
    @given(kappas, st.floats(min_value=0.05, max_value=12.0))
    @settings(max_examples=200)
    def test_sum_is_k(self, kappa, kk):
        k = kk / kappa
        p, q = amplitude_pq(kappa, k)
        assert (p + q).real == pytest.approx(k, rel=1e-15)
        assert abs((p + q).imag) <= 1e-15 * k

    @given(kappas, st.floats(min_value=0.05, max_value=12.0))
    @settings(max_examples=200)
    def test_product_identity(self, kappa, kk):
        k = kk / kappa
        p, q = amplitude_pq(kappa, k)
        expect = (k * k - 1.0 / kappa**2) / 3.0
        assert (p * q).real == pytest.approx(expect, rel=1e-12, abs=1e-13)
        assert abs((p * q).imag) <= 1e-12 * max(1.0, abs(expect))

    def test_real_product_example(self):
        p, q = amplitude_pq(1.0, 0.5)
        assert (p * q).real == pytest.approx(-0.25, rel=1e-14)
        assert p.imag == 0 and q.imag == 0

    def test_conjugate_pair_in_loop_band(self):
        # imaginary part is (1/kappa) sqrt(((kappa k)^2/4 - 1)/3)
        p, q = amplitude_pq(1.5, 3.2)
        assert p.real == pytest.approx(1.6, rel=1e-15)
        assert q.real == pytest.approx(1.6, rel=1e-15)
        beta = math.sqrt((1.5**2 * 3.2**2 / 4 - 1) / 3) / 1.5
        assert p.imag == pytest.approx(beta, rel=1e-13)
        assert q.imag == pytest.approx(-beta, rel=1e-13)


class TestClassifyMode:
    def test_loop_example(self):
        assert classify_mode(1.1, ModeSpec(2.1, -1)) is Regime.LOOP

    def test_smooth_example(self):
        assert classify_mode(0.91, ModeSpec(0.91, +1)) is Regime.SMOOTH

    def test_gap_band_rejected(self):
        with pytest.raises(InvalidRegime):
            classify_mode(1.0, ModeSpec(1.5, -1))  # a^2 < 0 there

    def test_wrong_sign_for_band(self):
        with pytest.raises(InvalidRegime):
            classify_mode(1.1, ModeSpec(2.1, +1))
        with pytest.raises(InvalidRegime):
            classify_mode(0.5, ModeSpec(0.5, -1))

    def test_velocity_pole(self):
        with pytest.raises(VelocityPole):
            classify_mode(1.0, ModeSpec(1.0, +1))

    @given(
        st.floats(min_value=1e-3, max_value=1e3),
        st.floats(min_value=1e-3, max_value=1e3),
        st.sampled_from([-1, +1]),
    )
    @settings(max_examples=300)
    def test_total(self, kappa, k, eps):
        """Every admissible-domain input lands in exactly one bucket."""
        try:
            outcome = classify_mode(kappa, ModeSpec(k, eps))
        except (InvalidRegime, VelocityPole) as exc:
            outcome = type(exc)
        assert outcome in (Regime.LOOP, Regime.SMOOTH, InvalidRegime, VelocityPole)


class TestSolitonSpec:
    def test_two_loop_spec(self):
        spec = SolitonSpec(1.5, [ModeSpec(3.2, -1), ModeSpec(3.8, -1)])
        assert spec.n == 2
        der = spec.derived()
        assert der[0].regime is Regime.LOOP
        assert der[0].c > der[1].c  # smaller k travels faster in the loop band

    def test_rejects_equal_wavenumbers(self):
        with pytest.raises(DegenerateModes):
            SolitonSpec(1.5, [ModeSpec(3.2, -1), ModeSpec(3.2, -1, y0=1.0)])

    def test_rejects_bad_counts(self):
        with pytest.raises(ParameterError):
            SolitonSpec(1.5, [])
        with pytest.raises(ParameterError):
            SolitonSpec(1.5, [ModeSpec(3.2, -1)] * 3)

    def test_rejects_bad_kappa(self):
        with pytest.raises(ParameterError):
            SolitonSpec(-1.0, [ModeSpec(3.2, -1)])

    def test_mode_field_validation(self):
        with pytest.raises(ParameterError):
            ModeSpec(-2.0, -1)
        with pytest.raises(ParameterError):
            ModeSpec(2.0, 0)
        with pytest.raises(ParameterError):
            ModeSpec(2.0, -1, y0=math.inf)
