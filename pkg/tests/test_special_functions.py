from __future__ import annotations

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fraclog.errors import DomainError, NotCertifiedError
from fraclog.special_functions import (
    MLQuery,
    Regime,
    gamma_fn,
    ml,
    ml_array,
    ml_asymptotic,
    ml_series,
    mittag_leffler,
    rgamma,
    rl_derivative_ml,
)
from oracles import ml_oracle, ml_reference

# Frozen from tests/oracles.py (mpmath, extended precision); the oracle
# module is re-run against these in test_oracles.py.
E05_M1 = 0.427583576155807  # = e * erfc(1)
E07_M5 = 0.0775693577647698
E07_M2 = 0.213786727015297
GAMMA_03 = 2.99156898768759


class TestSpecExamples:
    def test_zero_argument(self):
        assert ml_series(0.7, 0.0).value == 1.0
        assert mittag_leffler(MLQuery(0.9, 0.0, 1e-12)).value == 1.0

    def test_exponential_case(self):
        assert ml_series(1.0, -1.0).value == pytest.approx(math.exp(-1), abs=1e-12)
        assert ml_series(1.0, -1.0, 1e-16).value == pytest.approx(math.exp(-1), abs=1e-16)
        assert mittag_leffler(MLQuery(1.0, -3.0)).value == pytest.approx(math.exp(-3), abs=1e-12)

    def test_half_order(self):
        res = ml_series(0.5, -1.0)
        assert res.value == pytest.approx(E05_M1, abs=1e-14)
        assert res.value == pytest.approx(math.e * math.erfc(1.0), abs=1e-14)

    def test_mid_argument(self):
        res = mittag_leffler(MLQuery(0.7, -5.0, 1e-10))
        assert 0.0 < res.value < 1.0
        assert res.value == pytest.approx(E07_M5, abs=1e-10)
        assert res.error_bound <= 1e-10

    def test_asymptotic_single_term(self):
        assert ml_asymptotic(0.7, -1.0, 50.0, 1) == pytest.approx(50**-0.7 / GAMMA_03, rel=1e-12)

    def test_asymptotic_two_terms_within_remainder(self):
        exact = float(ml_oracle(0.5, -10.0))
        approx = ml_asymptotic(0.5, -1.0, 100.0, 2)
        # first dropped term: 100^{-1.5} / |Gamma(-0.5)|
        remainder = 100**-1.5 / abs(math.gamma(-0.5))
        assert abs(approx - exact) <= 1.5 * remainder

    def test_asymptotic_beta_one_vanishes(self):
        assert ml_asymptotic(1.0, -1.0, 40.0, 3) == 0.0

    def test_asymptotic_positive_lambda_dominant(self):
        # E_1(2 z) = exp(2z): the algebraic terms vanish, only the exponential remains
        assert ml_asymptotic(1.0, 2.0, 3.0, 2) == pytest.approx(math.exp(6.0), rel=1e-14)

    def test_rl_derivative(self):
        assert rl_derivative_ml(0.5, 0.0, 1.0) == pytest.approx(1 / math.sqrt(math.pi), abs=1e-15)
        assert rl_derivative_ml(1.0, -1.0, 2.0) == pytest.approx(-math.exp(-2), abs=1e-14)
        assert rl_derivative_ml(0.7, -2.0, 1.0) == pytest.approx(1 / GAMMA_03 - 2 * E07_M2, abs=1e-12)

    def test_gamma(self):
        assert gamma_fn(1.0) == 1.0
        assert gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-15)
        assert gamma_fn(0.3) == pytest.approx(GAMMA_03, rel=1e-13)


class TestErrors:
    @pytest.mark.parametrize("beta", [0.0, -0.5, 2.0, 2.5, math.nan])
    def test_order_domain(self, beta):
        with pytest.raises(DomainError):
            MLQuery(beta, -1.0)

    def test_bad_tolerance(self):
        with pytest.raises(DomainError):
            MLQuery(0.5, -1.0, 0.0)

    def test_nonfinite_argument(self):
        with pytest.raises(DomainError):
            MLQuery(0.5, math.inf)

    def test_gamma_pole(self):
        with pytest.raises(DomainError):
            gamma_fn(-2.0)
        with pytest.raises(DomainError):
            gamma_fn(0.0)

    def test_uncertifiable(self):
        with pytest.raises(NotCertifiedError):
            ml(0.3, 5.0, 1e-300)

    def test_asymptotic_arguments(self):
        with pytest.raises(DomainError):
            ml_asymptotic(0.5, -1.0, 10.0, 0)
        with pytest.raises(DomainError):
            ml_asymptotic(0.5, 0.0, 10.0, 1)
        with pytest.raises(DomainError):
            ml_asymptotic(0.5, -1.0, -1.0, 1)

    def test_rl_derivative_domain(self):
        with pytest.raises(DomainError):
            rl_derivative_ml(0.5, 1.0, 0.0)
        with pytest.raises(DomainError):
            rl_derivative_ml(1.5, 1.0, 1.0)


def test_rgamma_poles_are_zero():
    for n in range(0, 8):
        assert rgamma(-float(n)) == 0.0
    assert rgamma(0.5) == pytest.approx(1 / math.sqrt(math.pi), rel=1e-15)
    assert rgamma(200.5) == pytest.approx(float(mpmath.rgamma(200.5)), rel=1e-12)


def test_exponential_degeneration_grid():
    z = np.linspace(-30, 5, 1000)
    assert np.max(np.abs(ml(1.0, z) - np.exp(z))) <= 1e-12


def test_regimes_reported():
    assert mittag_leffler(MLQuery(0.5, -1.0)).regime is Regime.SERIES
    assert mittag_leffler(MLQuery(0.5, -200.0)).regime is Regime.ASYMPTOTIC_NEGATIVE


def test_array_matches_scalar():
    z = np.array([[-0.5, -3.0], [-40.0, 1.5]])
    arr = ml(0.8, z)
    assert arr.shape == z.shape
    for idx in np.ndindex(z.shape):
        assert arr[idx] == ml(0.8, float(z[idx]))


@pytest.mark.parametrize("beta", [0.3, 0.6, 0.9])
def test_regime_overlap_agreement(beta):
    # Just above the switch the asymptotic route is taken; the series
    # can still be forced there and both bounds must cover the gap.
    tol = 1e-10
    x = math.log(4 / tol) ** beta * 1.05
    series = ml_series(beta, -x, tol)
    full = mittag_leffler(MLQuery(beta, -x, tol))
    assert full.regime is Regime.ASYMPTOTIC_NEGATIVE
    assert abs(series.value - full.value) <= 2 * max(series.error_bound, full.error_bound, tol)


@settings(max_examples=40, deadline=None)
@given(beta=st.floats(0.2, 1.0), x=st.floats(0.0, 60.0))
def test_against_oracle_within_bound(beta, x):
    v, b, _, _ = ml_array(beta, -x, 1e-12)
    ref = float(ml_reference(beta, -x))
    assert b <= 1e-12
    assert abs(float(v) - ref) <= b + 1e-15


@settings(max_examples=25, deadline=None)
@given(beta=st.floats(0.3, 1.9), x=st.floats(0.0, 3.0))
def test_positive_axis_relative(beta, x):
    v = ml(beta, x, 1e-12)
    ref = float(ml_oracle(beta, x))
    assert abs(v - ref) <= 1e-12 * max(1.0, abs(ref))


@settings(max_examples=30, deadline=None)
@given(beta=st.floats(0.05, 1.0))
def test_complete_monotonicity(beta):
    x = np.sort(np.concatenate([np.linspace(0, 10, 80), np.geomspace(10, 1e4, 60)]))
    v = ml(beta, -x, 1e-12)
    assert np.all(v >= -1e-12) and np.all(v <= 1 + 1e-12)
    assert np.all(np.diff(v) <= 1e-12)


@settings(max_examples=30, deadline=None)
@given(beta=st.floats(0.05, 1.99))
def test_zero_is_exactly_one(beta):
    assert ml(beta, 0.0) == 1.0


@settings(max_examples=30, deadline=None)
@given(beta=st.floats(0.1, 1.0), mu=st.floats(-5, 2), t=st.floats(0.05, 5))
def test_rl_derivative_consistency(beta, mu, t):
    scaled = mu * ml(beta, mu * t**beta, 1e-13)
    lhs = rl_derivative_ml(beta, mu, t) - scaled
    # exact up to the rounding of one addition and one subtraction
    assert lhs == pytest.approx(t**-beta * rgamma(1 - beta), abs=1e-15 + 4e-16 * abs(scaled))
