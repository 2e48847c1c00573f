r"""Scalar Caputo initial-value problems on uniform grids.

:func:`solve_fracpece` is the fractional Adams-Bashforth-Moulton scheme in
PECE form (one corrector pass): a product-rectangle predictor followed by a
product-trapezoid corrector, both written as weighted sums over the whole
history of right-hand-side values.

:func:`caputo_l1` is the L1 discretization of the Caputo derivative of
sampled data; it is exact on piecewise-linear input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from fraclog.errors import DomainError, SolverError

Rhs = Callable[[float, float], float]


@dataclass(frozen=True)
class FdeProblem:
    """``D^beta w = rhs(t, w)`` (Caputo) with ``w(0) = w0`` on ``[0, t_end]``."""

    beta: float
    rhs: Rhs
    w0: float
    t_end: float
    h: float

    def __post_init__(self) -> None:
        if not 0.0 < self.beta <= 1.0:
            raise DomainError(f"order beta must lie in (0, 1], got {self.beta}")
        if not (self.h > 0 and self.t_end > 0):
            raise DomainError("step size and horizon must be positive")
        if not self.h < self.t_end:
            raise DomainError(f"step size {self.h} must be below the horizon {self.t_end}")
        if not math.isfinite(self.w0):
            raise DomainError(f"initial value must be finite, got {self.w0}")

    @property
    def steps(self) -> int:
        m = round(self.t_end / self.h)
        if abs(m * self.h - self.t_end) > 1e-9 * self.t_end:
            raise DomainError(f"horizon {self.t_end} is not a multiple of the step {self.h}")
        return m


@dataclass(frozen=True)
class SchemeInfo:
    name: str
    h: float
    beta: float
    predictor: str = "product rectangle, b_j = (h^beta/beta)((n+1-j)^beta - (n-j)^beta)"
    corrector: str = "product trapezoid, weights h^beta/Gamma(beta+2) a_j"
    corrector_passes: int = 1


@dataclass(frozen=True)
class FdeSolution:
    grid: np.ndarray
    values: np.ndarray
    scheme: SchemeInfo = field(repr=False)

    @property
    def h(self) -> float:
        return self.scheme.h


def _rhs_value(rhs: Rhs, t: float, w: float, step: int) -> float:
    try:
        f = float(rhs(t, w))
    except (OverflowError, ZeroDivisionError, ValueError) as exc:
        raise SolverError(f"right-hand side failed at step {step} (t={t:g}): {exc}", step) from exc
    if not math.isfinite(f):
        raise SolverError(f"non-finite right-hand side at step {step} (t={t:g})", step)
    return f


def solve_fracpece(p: FdeProblem) -> FdeSolution:
    """Integrate ``p`` with the one-pass fractional predictor-corrector."""
    beta, h, w0 = p.beta, p.h, p.w0
    M = p.steps
    grid = h * np.arange(M + 1)
    grid[-1] = p.t_end

    k = np.arange(M + 2, dtype=float)
    kb = k**beta
    kb1 = k ** (beta + 1)
    # predictor weight for lag m = n - j
    B = kb[1:] - kb[:-1]
    # corrector weight for lag m = n - j, 1 <= j <= n
    A = kb1[2:] + kb1[:-2] - 2 * kb1[1:-1]

    cp = h**beta / math.gamma(beta + 1)
    cc = h**beta / math.gamma(beta + 2)

    w = np.empty(M + 1)
    f = np.empty(M + 1)
    w[0] = w0
    f[0] = _rhs_value(p.rhs, 0.0, w0, 0)

    for n in range(M):
        hist = f[: n + 1]
        predicted = w0 + cp * np.dot(B[n::-1], hist)
        if not math.isfinite(predicted):
            raise SolverError(f"predictor diverged at step {n + 1}", n + 1)

        a0 = kb1[n] - (n - beta) * kb[n + 1]
        memory = a0 * f[0]
        if n > 0:
            memory += np.dot(A[n - 1 :: -1], f[1 : n + 1])
        fp = _rhs_value(p.rhs, grid[n + 1], predicted, n + 1)
        w[n + 1] = w0 + cc * (fp + memory)
        f[n + 1] = _rhs_value(p.rhs, grid[n + 1], w[n + 1], n + 1)

    return FdeSolution(grid, w, SchemeInfo("fracpece", h, beta))


def solve_fle(u0: float, beta: float, t_end: float, h: float) -> FdeSolution:
    """Fractional logistic equation ``D^beta w = w (1 - w)``, ``w(0) = u0``."""
    if not 0.0 < u0 <= 1.0:
        raise DomainError(f"u0 must lie in (0, 1], got {u0}")
    return solve_fracpece(FdeProblem(beta, lambda t, w: w * (1.0 - w), u0, t_end, h))


def caputo_l1(samples, beta: float, h: float | None = None) -> np.ndarray:
    """L1 approximation of the Caputo derivative of uniformly sampled data.

    ``samples`` is either an array of values with spacing ``h`` or an
    :class:`FdeSolution`. Returns an array of the same length whose first
    entry is NaN (the scheme starts at the second grid point).
    """
    if isinstance(samples, FdeSolution):
        h = samples.h if h is None else h
        samples = samples.values
    if h is None or not h > 0:
        raise DomainError("a positive grid spacing h is required")
    if beta == 1.0:
        raise DomainError("beta = 1 is an ordinary derivative; use plain differences")
    if not 0.0 < beta < 1.0:
        raise DomainError(f"order beta must lie in (0, 1), got {beta}")

    w = np.asarray(samples, dtype=float)
    if w.ndim != 1 or w.size < 2:
        raise DomainError("need at least two samples on a one-dimensional grid")

    M = w.size - 1
    m = np.arange(M, dtype=float)
    b = (m + 1) ** (1 - beta) - m ** (1 - beta)
    dw = np.diff(w)

    out = np.empty_like(w)
    out[0] = np.nan
    out[1:] = np.convolve(dw, b)[:M] * h**-beta / math.gamma(2 - beta)
    return out
