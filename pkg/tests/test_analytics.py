import math
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from wnla import (
    analytic_eta_prime,
    analytic_gain,
    analytic_success_prob,
    gain_threshold_check,
    is_limit,
)
from wnla.analytics import curve_point
from oracles import exact_eta_prime, exact_gain, exact_success

unit_open = st.floats(min_value=1e-6, max_value=1 - 1e-6)


class TestGain:
    @pytest.mark.parametrize("eta", [0.01, 0.1, 0.2, 0.37, 0.5, 0.8, 0.99])
    def test_fixed_point_at_half(self, eta):
        assert analytic_gain(eta, 0.5) == 1.0

    def test_small_t_limit(self):
        assert analytic_gain(0.2, 1e-9) == pytest.approx(5.0, abs=1e-7)
        g = analytic_gain(0.2, 0.0)
        assert g == 5.0 and is_limit(g)

    def test_known_value(self):
        want = exact_gain(Fraction("0.8"), Fraction("0.25"))
        assert want == Fraction(75, 65)
        assert analytic_gain(0.8, 0.25) == pytest.approx(float(want), rel=1e-15)

    def test_eta_zero_is_flagged_limit(self):
        g = analytic_gain(0.0, 0.3)
        assert is_limit(g)
        assert g == pytest.approx(0.7 / 0.3)

    def test_eta_one_t_one(self):
        g = analytic_gain(1.0, 1.0)
        assert g == 1.0 and is_limit(g)

    def test_interior_not_flagged(self):
        assert not is_limit(analytic_gain(0.4, 0.3))

    @pytest.mark.parametrize("eta,t", [(-0.1, 0.3), (0.2, 1.5)])
    def test_domain(self, eta, t):
        with pytest.raises(ValueError):
            analytic_gain(eta, t)

    @settings(max_examples=200)
    @given(eta=unit_open, t1=unit_open, t2=unit_open)
    def test_strictly_decreasing_in_t(self, eta, t1, t2):
        assume(t2 - t1 > 1e-6)
        assert analytic_gain(eta, t1) > analytic_gain(eta, t2)

    @settings(max_examples=200)
    @given(eta=unit_open, t=st.floats(min_value=1e-6, max_value=1.0))
    def test_bounds(self, eta, t):
        g = analytic_gain(eta, t)
        assert 0.0 <= g <= 1.0 / eta * (1 + 1e-15)
        if t < 1.0:
            assert g > 0.0

    @pytest.mark.parametrize("x", [0.9999989999999999, 1 - 2**-40, 1e-9])
    def test_no_cancellation_at_corners(self, x):
        want = float(exact_gain(Fraction(x), Fraction(x)))
        assert analytic_gain(x, x) == pytest.approx(want, rel=1e-14)

    @settings(max_examples=200)
    @given(eta=unit_open, t=unit_open)
    def test_matches_exact_rational(self, eta, t):
        want = exact_gain(Fraction(eta), Fraction(t))
        assert analytic_gain(eta, t) == pytest.approx(float(want), rel=1e-12)


class TestEtaPrime:
    def test_half(self):
        assert analytic_eta_prime(0.5, 0.5, 3) == pytest.approx(0.5, abs=1e-15)

    @pytest.mark.parametrize("t", [0.01, 0.3, 0.5, 0.99])
    def test_lossless_input(self, t):
        assert analytic_eta_prime(1.0, t, 4) == 1.0

    def test_known_value(self):
        want = exact_eta_prime(Fraction("0.2"), Fraction("0.3"), 3)
        assert want == Fraction(126, 342)
        assert analytic_eta_prime(0.2, 0.3, 3) == pytest.approx(float(want), rel=1e-14)

    def test_t_zero(self):
        assert is_limit(analytic_eta_prime(0.3, 0.0, 3))
        with pytest.raises(ValueError):
            analytic_eta_prime(0.0, 0.0, 3)

    @settings(max_examples=100)
    @given(eta=unit_open, t=st.floats(0.01, 0.99))
    def test_independent_of_n(self, eta, t):
        ref = analytic_eta_prime(eta, t, 2)
        for n in range(3, 9):
            assert abs(analytic_eta_prime(eta, t, n) - ref) <= 1e-15

    def test_n_must_be_at_least_two(self):
        with pytest.raises(ValueError):
            analytic_eta_prime(0.5, 0.5, 1)


class TestSuccessProb:
    @pytest.mark.parametrize("eta", [0.0, 0.2, 0.5, 0.8, 1.0])
    def test_one_eighth_at_half(self, eta):
        assert analytic_success_prob(eta, 0.5, 3) == 0.125

    def test_known_value(self):
        want = exact_success(Fraction("0.2"), Fraction("0.3"), 3)
        assert want == Fraction(342, 10000)
        assert analytic_success_prob(0.2, 0.3, 3) == pytest.approx(0.0342, rel=1e-14)

    @pytest.mark.parametrize("n", [2, 3, 6])
    def test_zero_at_t_zero(self, n):
        assert analytic_success_prob(0.4, 0.0, n) == 0.0

    @settings(max_examples=100)
    @given(eta=unit_open, t=st.floats(0.01, 0.99))
    def test_decreases_with_n(self, eta, t):
        values = [analytic_success_prob(eta, t, n) for n in range(2, 8)]
        assert all(a > b for a, b in zip(values, values[1:]))


class TestThreshold:
    @pytest.mark.parametrize(
        "eta,t,expected", [(0.3, 0.49, True), (0.3, 0.5, False), (0.9, 0.51, False)]
    )
    def test_examples(self, eta, t, expected):
        assert gain_threshold_check(eta, t) is expected

    @settings(max_examples=500)
    @given(eta=st.floats(min_value=5e-324, max_value=1.0, exclude_max=True), t=st.floats(0.0, 1.0))
    def test_equals_t_below_half(self, eta, t):
        assert gain_threshold_check(eta, t) == (t < 0.5)

    def test_near_half(self):
        below = math.nextafter(0.5, 0.0)
        above = math.nextafter(0.5, 1.0)
        assert gain_threshold_check(0.7, below)
        assert not gain_threshold_check(0.7, above)


def test_curve_point_flags_limit():
    p = curve_point("gain", 0.0, 3, 0.4)
    assert p.limit and p.value == pytest.approx(2.5)
    with pytest.raises(ValueError):
        curve_point("fidelity", 0.3, 3, 0.4)
