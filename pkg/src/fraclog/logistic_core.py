r"""Classical logistic curve and its Mittag-Leffler-weighted relatives.

With the geometric ratio :math:`a = (u_0 - 1)/u_0` the normalized logistic
solution expands as :math:`u(t) = \sum_k a^k e^{-kt}`. Replacing every
exponential by :math:`E_\beta(-k t^\beta)` gives the West function

.. math::

    w(t) = \sum_{n \ge 0} a^n E_\beta(-n t^\beta),

which is summed here with a truncation bound that holds uniformly in
``t`` because :math:`0 \le E_\beta(-x) \le 1` for :math:`0 < \beta \le 1`.
Only the unit growth rate is implemented; another rate ``k`` is the time
rescaling ``w_k(t) = w_1(k t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from fraclog.errors import DomainError, NotCertifiedError
from fraclog.special_functions import ml, rgamma

TERM_CAP = 10_000


@dataclass(frozen=True)
class LogisticParams:
    u0: float

    def __post_init__(self) -> None:
        if not self.u0 > 0.5:
            raise DomainError(
                f"u0 must exceed 1/2 for the geometric expansion to converge, got {self.u0}"
            )

    @property
    def a(self) -> float:
        return (self.u0 - 1.0) / self.u0


@dataclass(frozen=True)
class WestSeriesSpec:
    """How a truncated West-function sum was formed.

    ``tail_bound`` bounds the dropped terms for every ``t >= 0``; the
    Mittag-Leffler evaluations themselves are accurate to ``ml_tol`` each.
    """

    params: LogisticParams
    beta: float
    n_terms: int
    tail_bound: float
    ml_tol: float = 0.0


def _check_beta(beta: float) -> None:
    if not 0.0 < beta <= 1.0:
        raise DomainError(f"order beta must lie in (0, 1], got {beta}")


def _check_times(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(t)) or np.any(t < 0):
        raise DomainError("times must be finite and non-negative")
    return t


def _shape_like(values: np.ndarray, t: np.ndarray):
    return float(values) if t.ndim == 0 else values


def logistic_exact(u0: float, t):
    """Closed-form solution of ``u' = u (1 - u)`` with ``u(0) = u0``."""
    if not u0 > 0:
        raise DomainError(f"u0 must be positive, got {u0}")
    t = _check_times(t)
    values = u0 / (u0 + (1.0 - u0) * np.exp(-t))
    return _shape_like(values, t)


def series_ratio(u0: float) -> float:
    """Ratio ``a = (u0 - 1)/u0`` of the geometric expansion of the
    logistic curve; ``|a| < 1`` exactly when ``u0 > 1/2``."""
    return LogisticParams(u0).a


def _geometric_terms(r: float, tol: float) -> tuple[int, float]:
    """Smallest N with r**(N+1)/(1-r) <= tol, and that bound."""
    if r == 0.0:
        return 0, 0.0
    n = max(0, math.ceil(math.log(tol * (1.0 - r)) / math.log(r)) - 1)
    if n > TERM_CAP:
        raise NotCertifiedError(f"tolerance {tol:g} needs {n} terms, above the cap")
    return n, r ** (n + 1) / (1.0 - r)


def _weighted_terms(r: float, tol: float) -> tuple[int, float]:
    """Smallest N with sum_{m>N} (m+1) r**m <= tol, and that bound."""
    if r == 0.0:
        return 0, 0.0

    def tail(n: int) -> float:
        return r ** (n + 1) * ((n + 2) - (n + 1) * r) / (1.0 - r) ** 2

    n = 0
    while tail(n) > tol:
        n += 1
        if n > TERM_CAP:
            raise NotCertifiedError(f"tolerance {tol:g} needs more than {TERM_CAP} terms")
    return n, tail(n)


def _ml_grid(beta: float, t: np.ndarray, n_terms: int, tol: float) -> np.ndarray:
    """``E_beta(-n t**beta)`` for ``n = 0..n_terms``, shape ``(n_terms+1,) + t.shape``."""
    n = np.arange(n_terms + 1, dtype=float)
    z = -n.reshape((-1,) + (1,) * t.ndim) * t**beta
    return ml(beta, z, tol)


def west_function(u0: float, beta: float, t, tol: float = 1e-12):
    """West function at ``t`` (scalar or array) to absolute accuracy ``tol``.

    Returns ``(value, spec)``. Half the budget goes to truncation, half to
    the Mittag-Leffler evaluations.
    """
    params = LogisticParams(u0)
    _check_beta(beta)
    t = _check_times(t)
    if not tol > 0:
        raise DomainError(f"tolerance must be positive, got {tol}")

    a = params.a
    r = abs(a)
    if a == 0.0:
        return _shape_like(np.ones_like(t), t), WestSeriesSpec(params, beta, 1, 0.0)

    n_terms, tail = _geometric_terms(r, tol / 2)
    ml_tol = 0.5 * tol * (1.0 - r)
    E = _ml_grid(beta, t, n_terms, ml_tol)
    weights = a ** np.arange(n_terms + 1)
    values = np.tensordot(weights, E, axes=1)
    # at t = 0 every E_beta(0) = 1 and the sum is the geometric series itself
    values = np.where(t == 0, u0, values)
    spec = WestSeriesSpec(params, beta, n_terms + 1, tail, ml_tol)
    return _shape_like(values, t), spec


def square_series_coeffs(u0: float, m_max: int) -> np.ndarray:
    """Coefficients ``c_m = (m + 1) a**m``, with ``sum_m c_m e^{-ms} = u(s)**2``."""
    a = LogisticParams(u0).a
    m = np.arange(m_max + 1)
    return (m + 1) * a**m


def s2_series(u0: float, beta: float, t, tol: float = 1e-12):
    r"""Mittag-Leffler image of ``u(s)**2``:
    :math:`\sum_m (m+1) a^m E_\beta(-m t^\beta)`."""
    params = LogisticParams(u0)
    _check_beta(beta)
    t = _check_times(t)
    a = params.a
    r = abs(a)
    if a == 0.0:
        return _shape_like(np.ones_like(t), t)

    n_terms, _ = _weighted_terms(r, tol / 2)
    ml_tol = 0.5 * tol * (1.0 - r) ** 2
    E = _ml_grid(beta, t, n_terms, ml_tol)
    m = np.arange(n_terms + 1)
    values = np.tensordot((m + 1) * a**m, E, axes=1)
    values = np.where(t == 0, u0 * u0, values)
    return _shape_like(values, t)


def caputo_west_series(u0: float, beta: float, t, tol: float = 1e-12):
    r"""Caputo derivative of order ``beta`` of the West function, summed
    term by term: :math:`-\sum_{k \ge 1} k a^k E_\beta(-k t^\beta)`."""
    params = LogisticParams(u0)
    _check_beta(beta)
    t = _check_times(t)
    a = params.a
    r = abs(a)
    if a == 0.0:
        return _shape_like(np.zeros_like(t), t)

    # sum_{k>N} k r^k <= sum_{k>N} (k+1) r^k
    n_terms, _ = _weighted_terms(r, tol / 2)
    ml_tol = 0.5 * tol * (1.0 - r) ** 2
    E = _ml_grid(beta, t, n_terms, ml_tol)
    k = np.arange(n_terms + 1)
    values = -np.tensordot(k * a**k, E, axes=1)
    return _shape_like(values, t)


def polylog_series(s: int, x: float) -> float:
    """Polylogarithm ``Li_s(x) = sum_{k>=1} x**k / k**s`` for ``|x| < 1``."""
    if s < 1 or int(s) != s:
        raise DomainError(f"order s must be a positive integer, got {s}")
    if not abs(x) < 1:
        raise DomainError(f"|x| must be below 1, got {x}")
    if s == 1:
        return -math.log1p(-x)
    if x == 0:
        return 0.0

    r = abs(x)
    terms = []
    k = 1
    power = x
    # tail after k is below r**(k+1) / ((k+1)**s (1 - r))
    while True:
        terms.append(power / k**s)
        if r ** (k + 1) / ((k + 1) ** s * (1.0 - r)) < 1e-17:
            break
        k += 1
        power *= x
        if k > 10_000_000:
            raise NotCertifiedError(f"Li_{s}({x}) converges too slowly")
    return math.fsum(terms)


def west_asymptotic(u0: float, beta: float, t, order: int = 1):
    r"""Large-``t`` expansion of the West function.

    ``order=1`` keeps :math:`1 + \ln(u_0)\, t^{-\beta}/\Gamma(1-\beta)`;
    ``order=2`` adds :math:`-\mathrm{Li}_2(a)\, t^{-2\beta}/\Gamma(1-2\beta)`,
    which vanishes at ``beta = 1/2`` where the Gamma factor has a pole.
    """
    if order not in (1, 2):
        raise DomainError(f"order must be 1 or 2, got {order}")
    if not u0 >= 0.5:
        raise DomainError(f"u0 must be at least 1/2, got {u0}")
    _check_beta(beta)
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise DomainError("times must be positive")

    values = 1.0 + math.log(u0) * t**-beta * rgamma(1.0 - beta)
    if order == 2:
        a = (u0 - 1.0) / u0
        # Li_2(-1) = -pi^2/12 closes the u0 = 1/2 endpoint
        li2 = -math.pi**2 / 12 if a == -1.0 else polylog_series(2, a)
        values = values - li2 * t ** (-2 * beta) * rgamma(1.0 - 2 * beta)
    return _shape_like(values, t)
