from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fraclog.errors import DomainError
from fraclog.logistic_core import (
    LogisticParams,
    caputo_west_series,
    logistic_exact,
    polylog_series,
    s2_series,
    series_ratio,
    square_series_coeffs,
    west_asymptotic,
    west_function,
)
from fraclog.special_functions import ml, rgamma
from oracles import polylog_oracle, west_oracle

WEST_075_07_1 = 0.886423004761876
LI2_M13 = -0.309033126487808
U1 = 0.75 / (0.75 + 0.25 * math.exp(-1))  # logistic_exact(0.75, 1)

u0s = st.sampled_from([0.6, 0.75, 0.9, 1.5, 3.0])
betas = st.floats(0.2, 1.0)


def test_logistic_exact():
    assert logistic_exact(0.75, 0.0) == 0.75
    assert logistic_exact(1.0, 5.0) == 1.0
    assert logistic_exact(0.75, 1.0) == pytest.approx(0.890768, abs=5e-7)
    assert isinstance(logistic_exact(0.75, np.array([0.0, 1.0])), np.ndarray)


def test_series_ratio():
    assert series_ratio(0.75) == pytest.approx(-1 / 3)
    assert series_ratio(1.0) == 0.0
    assert series_ratio(2.0) == 0.5
    with pytest.raises(DomainError):
        series_ratio(0.5)
    with pytest.raises(DomainError):
        LogisticParams(0.2)


class TestWestFunction:
    def test_initial_value(self):
        w, spec = west_function(0.75, 0.7, 0.0, 1e-10)
        assert w == 0.75
        assert spec.tail_bound <= 0.5e-10

    def test_classical_case(self):
        assert west_function(0.75, 1.0, 1.0)[0] == pytest.approx(0.890768, abs=5e-7)
        assert west_function(0.75, 1.0, 1.0)[0] == pytest.approx(U1, abs=1e-12)

    def test_against_oracle(self):
        w, _ = west_function(0.75, 0.7, 1.0, 1e-10)
        assert w == pytest.approx(WEST_075_07_1, abs=1e-10)

    def test_fixed_point(self):
        w, _ = west_function(1.0, 0.4, np.array([0.0, 3.0]))
        assert np.all(w == 1.0)

    def test_rejects(self):
        with pytest.raises(DomainError):
            west_function(0.75, 1.2, 1.0)
        with pytest.raises(DomainError):
            west_function(0.75, 0.5, -1.0)
        with pytest.raises(DomainError):
            west_function(0.4, 0.5, 1.0)

    @pytest.mark.parametrize("u0, beta, t", [(0.6, 0.5, 2.0), (1.5, 0.9, 0.3), (0.9, 0.3, 7.0)])
    def test_oracle_grid(self, u0, beta, t):
        w, _ = west_function(u0, beta, t, 1e-12)
        assert w == pytest.approx(float(west_oracle(u0, beta, t, n_terms=200, digits=20)), abs=2e-12)


def test_square_coefficients():
    np.testing.assert_allclose(square_series_coeffs(0.75, 2), [1, -2 / 3, 1 / 3], rtol=1e-15)
    np.testing.assert_array_equal(square_series_coeffs(1.0, 3), [1, 0, 0, 0])


@pytest.mark.parametrize("u0", [0.6, 0.75, 2.0])
def test_geometric_identities(u0):
    a = series_ratio(u0)
    k = np.arange(2000)
    assert math.fsum(a**k) == pytest.approx(u0, abs=1e-13)
    assert math.fsum(square_series_coeffs(u0, 1999)) == pytest.approx(u0 * u0, abs=1e-12)


def test_s2_examples():
    assert s2_series(0.75, 0.7, 0.0) == 0.5625
    assert s2_series(1.0, 0.5, 3.0) == 1.0


def test_caputo_examples():
    assert caputo_west_series(0.75, 0.7, 0.0) == pytest.approx(0.1875, abs=1e-12)
    assert caputo_west_series(1.0, 0.3, 2.0) == 0.0
    assert caputo_west_series(0.75, 1.0, 1.0) == pytest.approx(U1 * (1 - U1), abs=1e-12)


def test_polylog():
    assert polylog_series(1, -1 / 3) == pytest.approx(-math.log(4 / 3), abs=1e-15)
    assert polylog_series(2, 0.0) == 0.0
    assert polylog_series(2, -1 / 3) == pytest.approx(LI2_M13, abs=1e-15)
    assert polylog_series(3, 0.9) == pytest.approx(float(polylog_oracle(3, 0.9, 2000)), abs=1e-14)
    with pytest.raises(DomainError):
        polylog_series(2, 1.0)
    with pytest.raises(DomainError):
        polylog_series(0, 0.5)


def test_west_asymptotic_examples():
    assert west_asymptotic(1.0, 0.7, 10.0) == 1.0
    expected = 1 - math.log(4 / 3) * 100**-0.7 / math.gamma(0.3)
    assert west_asymptotic(0.75, 0.7, 100.0) == pytest.approx(expected, abs=1e-14)
    # the second-order term vanishes at beta = 1/2 (pole of Gamma(1 - 2 beta))
    assert west_asymptotic(0.75, 0.5, 50.0, 2) == west_asymptotic(0.75, 0.5, 50.0, 1)
    with pytest.raises(DomainError):
        west_asymptotic(0.75, 0.5, 10.0, 3)


def test_west_asymptotic_remainder_order():
    t = np.array([10.0, 1e2, 1e3, 1e4])
    w, _ = west_function(0.75, 0.5, t)
    scaled = np.abs(w - west_asymptotic(0.75, 0.5, t)) * t
    ratios = scaled[1:] / scaled[:-1]
    assert np.all((ratios >= 0.1) & (ratios <= 10))


def test_second_order_asymptotic_improves():
    t = np.array([50.0, 200.0, 1000.0])
    w, _ = west_function(0.75, 0.7, t)
    e1 = np.abs(w - west_asymptotic(0.75, 0.7, t, 1))
    e2 = np.abs(w - west_asymptotic(0.75, 0.7, t, 2))
    assert np.all(e2 < e1)


@settings(max_examples=30, deadline=None)
@given(u0=u0s, beta=betas)
def test_initial_value_property(u0, beta):
    assert west_function(u0, beta, 0.0)[0] == pytest.approx(u0, abs=1e-12)


@settings(max_examples=20, deadline=None)
@given(u0=u0s)
def test_classical_degeneration(u0):
    t = np.linspace(0, 10, 200)
    w, _ = west_function(u0, 1.0, t)
    assert np.max(np.abs(w - logistic_exact(u0, t))) <= 1e-10


@settings(max_examples=30, deadline=None)
@given(u0=u0s, beta=betas, t=st.floats(0.1, 50.0))
def test_tail_control(u0, beta, t):
    r = abs(series_ratio(u0))
    w, _ = west_function(u0, beta, t)
    assert abs(w - 1) <= ml(beta, -(t**beta)) * r / (1 - r) + 1e-11


@settings(max_examples=30, deadline=None)
@given(u0=u0s, beta=betas, t=st.floats(0.0, 10.0))
def test_series_identity(u0, beta, t):
    w, _ = west_function(u0, beta, t, 1e-10)
    lhs = caputo_west_series(u0, beta, t, 1e-10)
    assert lhs == pytest.approx(w - s2_series(u0, beta, t, 1e-10), abs=1e-8)


@pytest.mark.parametrize("beta", [0.7, 0.8, 0.9])
def test_limit_one(beta):
    w, _ = west_function(0.75, beta, 1e4)
    assert abs(w - 1) <= 10 * abs(math.log(0.75)) * 1e4**-beta * rgamma(1 - beta)
