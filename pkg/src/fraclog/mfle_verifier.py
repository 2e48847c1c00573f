r"""Checks of the modified fractional logistic equation satisfied by the
West function, and estimation of the fractional order from late-time samples.

The equation balances

.. math::

    D^\beta w = w(1 - w) + \frac{u_0 t^{-\beta}}{\Gamma(1-\beta)}
                + \bigl(w^2 - S_2\bigr),

where :math:`S_2 = \sum_m (m+1) a^m E_\beta(-m t^\beta)` is the image of
``u(s)**2``. The term-by-term derivative of the West function only matches
the right side when ``D`` is read as the Riemann-Liouville derivative; with
the Caputo reading the two sides differ by exactly the singular term. The
derivative convention is therefore an explicit argument here.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from fraclog.errors import DomainError
from fraclog.fde_solver import caputo_l1
from fraclog.logistic_core import caputo_west_series, s2_series, west_function
from fraclog.special_functions import rgamma

log = logging.getLogger(__name__)

BETA_HAT_MAX = 1.5
DEFAULT_WINDOW = (20.0, 200.0)
DEFAULT_SAMPLES = 64


class Convention(str, enum.Enum):
    CAPUTO_SERIES = "caputo_series"
    RIEMANN_LIOUVILLE_SERIES = "riemann_liouville_series"
    NUMERICAL_L1 = "numerical_l1"

    @classmethod
    def parse(cls, name: "str | Convention") -> "Convention":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower()
        aliases = {"caputo": cls.CAPUTO_SERIES, "rl": cls.RIEMANN_LIOUVILLE_SERIES, "l1": cls.NUMERICAL_L1}
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise DomainError(f"unknown convention {name!r}") from None


class OrderMethod(str, enum.Enum):
    LIMIT_FORMULA = "limit_formula"
    LOGLOG_REGRESSION = "loglog_regression"

    @classmethod
    def parse(cls, name: "str | OrderMethod") -> "OrderMethod":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower()
        aliases = {"limit": cls.LIMIT_FORMULA, "regression": cls.LOGLOG_REGRESSION}
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise DomainError(f"unknown estimation method {name!r}") from None


@dataclass(frozen=True)
class ResidualReport:
    t_grid: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    residual: np.ndarray
    convention: Convention

    @property
    def max_abs_residual(self) -> float:
        return float(np.max(np.abs(self.residual)))


@dataclass(frozen=True)
class OrderEstimate:
    """Estimated order ``beta_hat`` (clipped to ``BETA_HAT_MAX``).

    ``saturated`` flags a decay faster than any power law, e.g. the
    exponential approach of the classical logistic curve.
    """

    beta_hat: float
    method: OrderMethod
    window: tuple[float, float]
    diagnostics: dict = field(default_factory=dict, repr=False)
    saturated: bool = False


def _singular_term(u0: float, beta: float, t):
    return u0 * np.asarray(t, dtype=float) ** -beta * rgamma(1.0 - beta)


def double_integral_term(u0: float, beta: float, t, tol: float = 1e-12):
    """``w(t)**2 - S2(t)``: the double-integral correction of the equation."""
    w, _ = west_function(u0, beta, t, tol)
    s2 = s2_series(u0, beta, t, tol)
    return w * w - s2


def mfle_rhs(u0: float, beta: float, t, tol: float = 1e-12):
    """Right side ``w(1-w) + u0 t^-beta/Gamma(1-beta) + (w**2 - S2)`` for ``t > 0``."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(~(t_arr > 0)):
        raise DomainError("the right side is singular at t = 0; times must be positive")
    w, _ = west_function(u0, beta, t_arr, tol)
    s2 = s2_series(u0, beta, t_arr, tol)
    values = w * (1.0 - w) + _singular_term(u0, beta, t_arr) + (w * w - s2)
    return float(values) if t_arr.ndim == 0 else values


def _l1_lhs(u0: float, beta: float, t: np.ndarray, tol: float, h: float) -> np.ndarray:
    steps = np.rint(t / h).astype(int)
    if np.any(np.abs(steps * h - t) > 1e-9 * np.maximum(t, 1.0)):
        raise DomainError(f"every grid time must be a multiple of the L1 step {h}")
    dense = h * np.arange(int(steps.max()) + 1)
    w, _ = west_function(u0, beta, dense, tol)
    caputo = caputo_l1(w, beta, h)[steps]
    # Riemann-Liouville = Caputo + w(0) t^-beta / Gamma(1 - beta), with w(0) = u0
    return caputo + _singular_term(u0, beta, t)


def residual(
    u0: float,
    beta: float,
    t_grid,
    convention: "str | Convention" = Convention.RIEMANN_LIOUVILLE_SERIES,
    tol: float = 1e-12,
    h: float = 2.0**-10,
) -> ResidualReport:
    """Left side minus right side of the equation on ``t_grid``.

    ``numerical_l1`` differentiates dense West-function samples (step ``h``)
    with the L1 scheme and adds the initial-value term, i.e. it is a
    numerical counterpart of the Riemann-Liouville series convention.
    """
    conv = Convention.parse(convention)
    t = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if t.ndim != 1 or t.size == 0:
        raise DomainError("t_grid must be a non-empty one-dimensional sequence")
    if np.any(~(t > 0)) or np.any(~np.isfinite(t)):
        raise DomainError("t_grid must be finite and strictly positive")
    if np.any(np.diff(t) <= 0):
        raise DomainError("t_grid must be strictly increasing")
    if beta == 1.0 and conv is Convention.NUMERICAL_L1:
        raise DomainError("the L1 scheme needs beta < 1")

    if conv is Convention.NUMERICAL_L1:
        lhs = _l1_lhs(u0, beta, t, tol, h)
    else:
        lhs = caputo_west_series(u0, beta, t, tol)
        if conv is Convention.RIEMANN_LIOUVILLE_SERIES:
            lhs = lhs + _singular_term(u0, beta, t)
    rhs = mfle_rhs(u0, beta, t, tol)
    return ResidualReport(t, lhs, rhs, lhs - rhs, conv)


def default_window_times(window: tuple[float, float] = DEFAULT_WINDOW, n: int = DEFAULT_SAMPLES) -> np.ndarray:
    return np.geomspace(window[0], window[1], n)


def _fitted_limit(t: np.ndarray, w: np.ndarray, beta: float) -> float:
    """Intercept ``w_inf`` of a least-squares fit ``w ~ w_inf + c1 t^-b + c2 t^-2b``."""
    X = np.column_stack([np.ones_like(t), t**-beta, t ** (-2 * beta)])
    coef, *_ = np.linalg.lstsq(X, w, rcond=None)
    return float(coef[0])


def _plain_slope(logt: np.ndarray, logy: np.ndarray) -> tuple[float, float, float]:
    slope, intercept = np.polyfit(logt, logy, 1)
    rms = float(np.sqrt(np.mean((logy - (slope * logt + intercept)) ** 2)))
    return -float(slope), float(intercept), rms


def _two_term_fit(t: np.ndarray, y: np.ndarray, guess: float) -> tuple[float, float]:
    """Refine the decay exponent with ``1 - w ~ c1 t^-b + c2 t^-2b``.

    The residual is weighted by ``1/|1 - w|`` so that it approximates the
    residual of ``ln|1 - w|``. For each trial ``b`` the coefficients are
    solved linearly; ``b`` is searched in ``[0.8, 1.2] * guess``. The
    bracket keeps the search away from the alias ``b/2``, where the
    two-term basis contains the one-term model as a special case.
    """
    weight = 1.0 / np.abs(y)
    target = np.sign(y)

    def cost(b: float) -> float:
        X = np.column_stack([t**-b, t ** (-2 * b)]) * weight[:, None]
        coef, *_ = np.linalg.lstsq(X, target, rcond=None)
        return float(np.sum((X @ coef - target) ** 2))

    res = minimize_scalar(cost, bounds=(0.8 * guess, 1.2 * guess), method="bounded", options={"xatol": 1e-10})
    return float(res.x), float(math.sqrt(res.fun / t.size))


def estimate_order(
    t,
    w,
    u0: float,
    method: "str | OrderMethod" = OrderMethod.LOGLOG_REGRESSION,
    *,
    correction: bool = True,
) -> OrderEstimate:
    """Estimate the fractional order from late-time samples ``(t_i, w_i)``.

    ``limit_formula`` evaluates ``t w'/(1 - w)`` pointwise (``w'`` by
    second-order differences on the possibly non-uniform grid) and returns
    the median over the last quartile. ``loglog_regression`` fits
    ``ln|1 - w|`` against ``ln t``; with ``correction`` (the default) the
    plain slope is refined by the two-term model of :func:`_two_term_fit`,
    which removes the bias from the ``t^-2beta`` correction of the
    large-time expansion. ``correction=False`` returns the plain slope.
    """
    meth = OrderMethod.parse(method)
    t = np.asarray(t, dtype=float)
    w = np.asarray(w, dtype=float)
    if t.shape != w.shape or t.ndim != 1:
        raise DomainError("t and w must be one-dimensional arrays of equal length")
    if t.size < 8:
        raise DomainError(f"need at least 8 samples, got {t.size}")
    if u0 == 1.0:
        raise DomainError("u0 = 1 gives a constant solution with no decay to fit")
    if not np.all(np.isfinite(t)) or not np.all(np.isfinite(w)):
        raise DomainError("samples must be finite")
    if t[0] < 5.0:
        raise DomainError(f"the window must start at t >= 5, got {t[0]}")
    if np.any(np.diff(t) <= 0):
        raise DomainError("sample times must be strictly increasing")
    y = 1.0 - w
    if np.any(y == 0.0):
        raise DomainError("w equals 1 inside the window; the estimator is undefined there")

    window = (float(t[0]), float(t[-1]))
    diagnostics: dict = {}
    if meth is OrderMethod.LIMIT_FORMULA:
        pointwise = t * np.gradient(w, t) / y
        tail = pointwise[-max(2, t.size // 4) :]
        raw = float(np.median(tail))
        diagnostics["pointwise"] = pointwise
    else:
        logt = np.log(t)
        raw, intercept, rms = _plain_slope(logt, np.log(np.abs(y)))
        diagnostics.update(plain_slope=raw, intercept=intercept, fit_rms=rms)
        if correction and 0.0 < raw < 1.0:
            raw, rms2 = _two_term_fit(t, y, raw)
            diagnostics["corrected_fit_rms"] = rms2

    saturated = not raw < 1.0
    beta_hat = min(raw, BETA_HAT_MAX)
    if saturated:
        log.info("order estimate %.3g saturated: decay faster than any power law", raw)
    elif raw > 0.0:
        diagnostics["fitted_limit"] = _fitted_limit(t, w, raw)
    diagnostics["raw_estimate"] = raw
    return OrderEstimate(beta_hat, meth, window, diagnostics, saturated)
