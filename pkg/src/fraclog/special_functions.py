r"""Real-argument Mittag-Leffler function with certified error bounds.

The one-parameter function

.. math::

    E_\beta(z) = \sum_{k \ge 0} \frac{z^k}{\Gamma(\beta k + 1)}

is evaluated by one of two routes:

* the power series, accumulated by Horner's rule in double-double
  arithmetic so that the cancellation on the negative axis (which costs
  roughly :math:`\exp(|z|^{1/\beta})` in relative terms) is absorbed;
* the algebraic large-argument expansion, truncated where the first
  dropped term falls below the tolerance.

Every evaluation carries an a-posteriori error bound; a request whose
tolerance cannot be met raises :class:`~fraclog.errors.NotCertifiedError`.
"""

from __future__ import annotations

import enum
import math
import threading
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy import special

from fraclog.errors import DomainError, NotCertifiedError

EPS = float(np.finfo(float).eps)
#: unit roundoff of double-double arithmetic
DD_EPS = 2.0**-104
TERM_CAP = 10_000

# beyond this many algebraic terms 1/Gamma(1 - beta k) leaves double range
_ASYMPTOTIC_MAX_TERMS = 400


class Regime(str, enum.Enum):
    SERIES = "series"
    ASYMPTOTIC_NEGATIVE = "asymptotic_negative"
    ASYMPTOTIC_POSITIVE = "asymptotic_positive"


@dataclass(frozen=True)
class MLQuery:
    """A request for :math:`E_\\beta(z)` to absolute tolerance ``tol``."""

    beta: float
    z: float
    tol: float = 1e-12

    def __post_init__(self) -> None:
        _check_order(self.beta)
        if not self.tol > 0:
            raise DomainError(f"tolerance must be positive, got {self.tol}")
        if not math.isfinite(self.z):
            raise DomainError(f"argument must be finite, got {self.z}")


@dataclass(frozen=True)
class MLResult:
    value: float
    regime: Regime
    terms_used: int
    error_bound: float


def _check_order(beta: float) -> None:
    if not 0.0 < beta < 2.0:
        raise DomainError(f"order beta must lie in (0, 2), got {beta}")


# {{{ gamma

def _is_pole(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


def gamma_fn(x: float) -> float:
    """Gamma function; raises :class:`DomainError` at the poles."""
    if _is_pole(x):
        raise DomainError(f"Gamma has a pole at {x}")
    return math.gamma(x)


def rgamma(x: float) -> float:
    """Reciprocal Gamma function, with ``1/Gamma(-n) = 0`` at the poles."""
    if _is_pole(x):
        return 0.0
    if -170.0 < x < 171.0:
        return 1.0 / math.gamma(x)
    if x > 0:
        return math.exp(-math.lgamma(x))
    # sign of Gamma on (-n-1, -n) is (-1)**(n+1)
    sign = -1.0 if math.floor(-x) % 2 == 0 else 1.0
    return sign * math.exp(-math.lgamma(x))

# }}}


# {{{ power-series coefficients 1/Gamma(beta k + 1) as double-double pairs

_coef_lock = threading.Lock()
_coef_cache: dict[float, tuple[np.ndarray, np.ndarray]] = {}


def _coefficients(beta: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(hi, lo)`` with ``hi[k] + lo[k] = 1/Gamma(beta k + 1)`` to
    about 32 significant digits, for ``k < n``."""
    with _coef_lock:
        hi, lo = _coef_cache.get(beta, (np.empty(0), np.empty(0)))
        if hi.size >= n:
            return hi, lo

        size = max(n, 2 * hi.size, 64)
        new_hi = np.empty(size - hi.size)
        new_lo = np.empty(size - hi.size)
        with mpmath.workdps(40):
            b = mpmath.mpf(beta)
            for i, k in enumerate(range(hi.size, size)):
                c = mpmath.rgamma(b * k + 1)
                h = float(c)
                new_hi[i] = h
                new_lo[i] = float(c - h)

        hi = np.concatenate([hi, new_hi])
        lo = np.concatenate([lo, new_lo])
        _coef_cache[beta] = (hi, lo)
        return hi, lo


def _terms_needed(beta: float, x: float, target: float) -> int | None:
    """Smallest ``K`` such that the series tail beyond ``k = K`` at ``|z| = x``
    is below ``target``, or *None* if that takes more than ``TERM_CAP`` terms.
    """
    if x == 0.0:
        return 0

    ks = np.arange(TERM_CAP + 2, dtype=float)
    logt = ks * math.log(x) - special.gammaln(beta * ks + 1)
    # ratio of consecutive terms; decreasing in k by log-convexity of Gamma
    logr = np.diff(logt)
    with np.errstate(divide="ignore", invalid="ignore"):
        tail = logt[1:-1] - np.log(-np.expm1(logr[1:]))
    ok = (logr[1:] < 0) & (tail < math.log(target))
    if not ok.any():
        return None
    return int(np.argmax(ok))

# }}}


# {{{ double-double Horner

_SPLIT = 134217729.0  # 2**27 + 1


def _split(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    t = _SPLIT * a
    hi = t - (t - a)
    return hi, a - hi


def _dd_horner(hi: np.ndarray, lo: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Evaluate ``sum_k (hi[k] + lo[k]) z**k`` in double-double arithmetic."""
    zh, zl = _split(z)
    s_hi = np.full_like(z, hi[-1])
    s_lo = np.full_like(z, lo[-1])
    for k in range(hi.size - 2, -1, -1):
        # (s_hi + s_lo) * z
        p = s_hi * z
        ah, al = _split(s_hi)
        e = ((ah * zh - p) + ah * zl + al * zh) + al * zl
        e += s_lo * z
        # + (hi[k] + lo[k])
        s = p + hi[k]
        bb = s - p
        f = (p - (s - bb)) + (hi[k] - bb)
        f += e + lo[k]
        s_hi = s + f
        s_lo = f - (s_hi - s)
    return s_hi + s_lo


def _series_block(beta: float, z: np.ndarray, targets: np.ndarray):
    """Series evaluation of one block of arguments sharing a term count."""
    x = np.abs(z)
    xmax = float(x.max())
    target = float(targets.min())
    K = _terms_needed(beta, xmax, 1e-2 * target)
    if K is None:
        return None

    hi, lo = _coefficients(beta, K + 3)
    if hi[K + 2] < 1e-290:
        # coefficients leave the double-double exponent range
        return None
    values = _dd_horner(hi[: K + 1], lo[: K + 1], z)

    # sum of |terms| = E_beta(|z|): no cancellation, plain double suffices
    abs_sum = np.zeros_like(x)
    for k in range(K, -1, -1):
        abs_sum = abs_sum * x + hi[k]

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        t_next = np.exp(math.log(hi[K + 1]) + (K + 1) * np.log(x))
        r_next = x * (hi[K + 2] / hi[K + 1])
        tail = np.where(r_next < 1, t_next / (1 - r_next), np.inf)
    tail = np.where(x == 0, 0.0, tail)

    bound = (4 * K + 8) * DD_EPS * abs_sum + tail + EPS * np.abs(values)
    return values, bound, K + 1

# }}}


# {{{ large-argument expansions

def _algebraic_terms(beta: float, X: np.ndarray, nmax: int) -> np.ndarray:
    """Matrix of ``-X**(-k) / Gamma(1 - beta k)`` for ``k = 1..nmax``."""
    ks = np.arange(1, nmax + 1, dtype=float)
    rg = special.rgamma(1.0 - beta * ks)
    rg[np.isclose(beta * ks, np.round(beta * ks), rtol=0, atol=1e-15)] = 0.0
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        logx = np.log(np.abs(X))[:, None]
        mag = np.exp(-ks[None, :] * logx)
        sign = np.where(X < 0, -1.0, 1.0)[:, None] ** ks[None, :]
        return -sign * mag * rg[None, :]


def _asymptotic_block(beta: float, z: np.ndarray, targets: np.ndarray):
    """Truncated large-argument expansion; entries that fail to certify
    come back with an infinite bound."""
    values = np.empty_like(z)
    bounds = np.full_like(z, np.inf)
    terms = np.ones(z.shape, dtype=int)
    pending = np.arange(z.size)
    limit = int(min(_ASYMPTOTIC_MAX_TERMS, max(2, 160.0 / beta)))
    # most arguments need only a handful of terms; widen the matrix for the rest
    for nmax in (16, 64, limit):
        nmax = min(nmax, limit)
        v, b, n = _asymptotic_fixed(beta, z[pending], targets[pending], nmax)
        done = b < np.inf
        values[pending], bounds[pending], terms[pending] = v, b, n
        pending = pending[~done]
        if not pending.size or nmax == limit:
            break
    return values, bounds, terms


def _asymptotic_fixed(beta: float, z: np.ndarray, targets: np.ndarray, nmax: int):
    x = np.abs(z)
    terms = _algebraic_terms(beta, z, nmax)
    terms = np.where(np.isfinite(terms), terms, np.inf)
    absterms = np.abs(terms)

    # remainder estimate after keeping n terms: twice the next three dropped
    # terms (a single one may sit on a pole of Gamma and vanish)
    beyond = 0.0 if not absterms.any() else np.inf
    ext = np.concatenate([absterms, np.full((z.size, 3), beyond)], axis=1)
    drop = 2.0 * (ext[:, :-3] + ext[:, 1:-2] + ext[:, 2:-1])

    ok = drop < 0.5 * targets[:, None]
    has = ok.any(axis=1)
    n = np.where(has, np.argmax(ok, axis=1), nmax - 1)
    dropped = np.take_along_axis(drop, n[:, None], axis=1)[:, 0]

    partial = np.cumsum(np.where(np.isfinite(terms), terms, 0.0), axis=1)
    partial = np.concatenate([np.zeros((z.size, 1)), partial], axis=1)
    values = np.take_along_axis(partial, n[:, None], axis=1)[:, 0]
    mask = np.arange(nmax)[None, :] < n[:, None]
    absum = np.sum(np.where(mask, absterms, 0.0), axis=1)

    with np.errstate(over="ignore"):
        root = x ** (1.0 / beta)
    exp_part = np.zeros_like(x)
    stokes = np.zeros_like(x)
    if beta == 1.0:
        exp_part = np.exp(np.where(z < 0, -x, x))
    elif beta > 1.0 and np.all(z < 0):
        amp = np.exp(root * math.cos(math.pi / beta))
        exp_part = (2.0 / beta) * amp * np.cos(root * math.sin(math.pi / beta))
        stokes = 2.0 * np.exp(-root)
    elif np.all(z > 0):
        # overflow yields an infinite bound, i.e. an uncertified entry
        with np.errstate(over="ignore", invalid="ignore"):
            exp_part = np.exp(root) / beta
    else:
        # exponentially small remainder beyond all algebraic orders
        stokes = 2.0 * np.exp(-root)
    values = values + exp_part

    # exp() inherits the rounding of its argument: relative error ~ root * eps
    with np.errstate(over="ignore", invalid="ignore"):
        bound = dropped + stokes + EPS * (4 * (absum + np.abs(values)) + 2 * root * np.abs(exp_part))
    bound = np.where(has, bound, np.inf)
    return values, bound, np.maximum(n, 1)

# }}}


# {{{ dispatcher

_CODE = {0: Regime.SERIES, 1: Regime.ASYMPTOTIC_NEGATIVE, 2: Regime.ASYMPTOTIC_POSITIVE}


def ml_array(beta: float, z, tol: float = 1e-12, *, strict: bool = True):
    """Vectorized Mittag-Leffler evaluation.

    Returns ``(values, bounds, regimes, terms)`` as arrays shaped like ``z``;
    ``regimes`` holds codes 0 (series), 1 (negative-axis expansion) and
    2 (positive-axis expansion). On the positive axis the tolerance is
    relative to ``max(1, E_beta(z))``.

    With ``strict`` (the default) an uncertified entry raises
    :class:`NotCertifiedError`; otherwise its bound is reported as is.
    """
    _check_order(beta)
    if not tol > 0:
        raise DomainError(f"tolerance must be positive, got {tol}")

    z = np.asarray(z, dtype=float)
    shape = z.shape
    if not np.all(np.isfinite(z)):
        raise DomainError("arguments must be finite")

    uz, inverse = np.unique(z.ravel(), return_inverse=True)
    values = np.ones_like(uz)
    bounds = np.zeros_like(uz)
    regimes = np.zeros(uz.shape, dtype=int)
    terms = np.ones(uz.shape, dtype=int)

    x = np.abs(uz)
    with np.errstate(over="ignore"):
        root = x ** (1.0 / beta)
    pending = uz != 0

    # large negative arguments: algebraic expansion once exp(-|z|^(1/beta))
    # is safely below the tolerance
    cand = pending & (uz < 0) & (root >= math.log(4.0 / tol))
    if cand.any():
        v, b, n = _asymptotic_block(beta, uz[cand], np.full(int(cand.sum()), tol))
        good = b <= tol
        idx = np.flatnonzero(cand)[good]
        values[idx], bounds[idx], terms[idx] = v[good], b[good], n[good]
        regimes[idx] = 1
        pending[idx] = False

    # everything else through the double-double power series, bucketed by
    # magnitude so that small arguments do not pay for the largest one
    idx_all = np.flatnonzero(pending)
    while idx_all.size:
        xb = x[idx_all]
        top = xb.max()
        sel = xb >= top / 1.5
        idx = idx_all[sel]
        idx_all = idx_all[~sel]

        zb = uz[idx]
        positive = zb > 0
        # positive arguments: relative tolerance, scaled by a lower bound
        # on E_beta(z) (its first two terms)
        scale = np.where(positive, np.maximum(1.0, 1.0 + zb / math.gamma(1 + beta)), 1.0)
        res = _series_block(beta, zb, tol * scale)
        if res is None:
            if np.all(positive):
                v, b, n = _asymptotic_block(beta, zb, tol * np.exp(np.minimum(x[idx] ** (1 / beta), 700)))
                values[idx], bounds[idx], terms[idx] = v, b, n
                regimes[idx] = 2
                continue
            values[idx], bounds[idx] = np.nan, np.inf
            terms[idx] = TERM_CAP
            continue
        v, b, n = res
        values[idx], bounds[idx], terms[idx] = v, b, n

    allowed = tol * np.maximum(1.0, np.where(uz > 0, np.abs(values), 1.0))
    bad = ~(bounds <= allowed)
    if strict and bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise NotCertifiedError(
            f"E_{beta}({uz[i]}) could not be certified to {tol:g}"
            f" (achieved bound {bounds[i]:.3g})",
            bound=float(bounds[i]),
        )

    return (
        values[inverse].reshape(shape),
        bounds[inverse].reshape(shape),
        regimes[inverse].reshape(shape),
        terms[inverse].reshape(shape),
    )


def mittag_leffler(q: MLQuery) -> MLResult:
    """Evaluate :math:`E_\\beta(z)` to absolute tolerance ``q.tol``.

    Raises :class:`NotCertifiedError` when neither route can guarantee the
    tolerance.
    """
    v, b, r, n = ml_array(q.beta, q.z, q.tol)
    return MLResult(float(v), _CODE[int(r)], int(n), float(b))


def ml(beta: float, z, tol: float = 1e-12):
    """Shorthand returning only the values of :func:`ml_array`."""
    v = ml_array(beta, z, tol)[0]
    return float(v) if v.ndim == 0 else v


def ml_series(beta: float, z: float, tol: float = 1e-12) -> MLResult:
    """Power-series evaluation, summed until the tail drops below ``tol``.

    The error bound includes the accumulated rounding, so a result whose
    bound exceeds ``tol`` signals an argument outside the series regime.
    """
    _check_order(beta)
    if not tol > 0:
        raise DomainError(f"tolerance must be positive, got {tol}")
    if z == 0:
        return MLResult(1.0, Regime.SERIES, 1, 0.0)
    res = _series_block(beta, np.array([float(z)]), np.array([tol]))
    if res is None:
        raise NotCertifiedError(
            f"power series for E_{beta}({z}) did not converge within {TERM_CAP} terms"
        )
    v, b, n = res
    return MLResult(float(v[0]), Regime.SERIES, int(n), float(b[0]))


def ml_asymptotic(beta: float, lam: float, z: float, n: int) -> float:
    r"""``n``-term large-``z`` expansion of :math:`E_\beta(\lambda z^\beta)`.

    For ``lam < 0`` only the algebraic terms remain. For ``lam > 0`` the
    dominant term :math:`\beta^{-1}\exp(\lambda^{1/\beta} z)` is added.
    """
    _check_order(beta)
    if n < 1:
        raise DomainError(f"number of terms must be at least 1, got {n}")
    if lam == 0:
        raise DomainError("lambda must be non-zero")
    if not z > 0:
        raise DomainError(f"z must be positive, got {z}")

    total = 0.0
    for k in range(1, n + 1):
        total -= z ** (-k * beta) / lam**k * rgamma(1.0 - k * beta)
    if lam > 0:
        total += math.exp(lam ** (1.0 / beta) * z) / beta
    return total


def rl_derivative_ml(beta: float, mu: float, t: float, tol: float = 1e-13) -> float:
    r"""Riemann-Liouville derivative of order ``beta`` of
    :math:`E_\beta(\mu t^\beta)`, evaluated at ``t``."""
    if not 0.0 < beta <= 1.0:
        raise DomainError(f"order beta must lie in (0, 1], got {beta}")
    if not t > 0:
        raise DomainError(f"time must be positive, got {t}")
    return t**-beta * rgamma(1.0 - beta) + mu * ml(beta, mu * t**beta, tol)

# }}}
