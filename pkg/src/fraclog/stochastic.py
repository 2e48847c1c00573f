"""Monte Carlo checks of the subordination identities.

The inverse stable subordinator at a fixed time is sampled through the
exact distributional identity ``L_t = (t / S)**beta``, with ``S`` a
standard one-sided stable variable (Laplace transform ``exp(-lam**beta)``)
drawn by the Kanter / Chambers-Mallows-Stuck representation.

Estimates are accumulated over fixed-size chunks, each drawn from its own
substream ``(seed, stream_id, chunk)``. Per-chunk statistics are merged by
a pairwise tree in chunk order, so results are bit-identical for a given
seed and sample count no matter how many worker threads are used.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from fraclog.errors import DomainError
from fraclog.logistic_core import logistic_exact

CHUNK = 1 << 16


@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream identified by ``(seed, stream_id)``."""

    seed: int
    stream_id: int = 0

    def __post_init__(self) -> None:
        if not 0 <= int(self.seed) < 2**64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if int(self.stream_id) < 0:
            raise DomainError(f"stream_id must be non-negative, got {self.stream_id}")

    def substream(self, index: int) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream_id), int(index)))
        return np.random.Generator(np.random.PCG64(ss))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream_id),))
        return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    n: int

    def z_score(self, reference: float) -> float:
        """``(mean - reference) / std_error``; 0 when both coincide exactly."""
        diff = self.mean - reference
        if self.std_error == 0.0:
            return 0.0 if diff == 0.0 else math.copysign(math.inf, diff)
        return diff / self.std_error

    def agrees_with(self, reference: float, sigmas: float = 3.0) -> bool:
        return abs(self.z_score(reference)) <= sigmas


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngStream):
        return rng.generator()
    if rng is None or isinstance(rng, (int, np.integer)):
        return RngStream(0 if rng is None else int(rng)).generator()
    raise DomainError(f"cannot build a random generator from {type(rng).__name__}")


def _as_stream(rng) -> RngStream:
    if isinstance(rng, RngStream):
        return rng
    if rng is None or isinstance(rng, (int, np.integer)):
        return RngStream(0 if rng is None else int(rng))
    raise DomainError("Monte Carlo estimators need an RngStream or an integer seed")


def _check_stable_order(beta: float) -> None:
    if not 0.0 < beta < 1.0:
        raise DomainError(f"stable index must lie strictly between 0 and 1, got {beta}")


def sample_stable(beta: float, rng, size=None):
    """Standard one-sided ``beta``-stable draws, ``E[exp(-lam S)] = exp(-lam**beta)``."""
    _check_stable_order(beta)
    gen = _as_generator(rng)
    # uniform on (0, 1]: sin(pi U) never vanishes at the lower end
    U = 1.0 - gen.random(size)
    E = gen.standard_exponential(size)
    pu = np.pi * U
    S = (np.sin(beta * pu) / np.sin(pu) ** (1.0 / beta)) * (np.sin((1.0 - beta) * pu) / E) ** (
        (1.0 - beta) / beta
    )
    return float(S) if size is None else S


def sample_inverse_subordinator(beta: float, t: float, rng, size=None):
    """Draws of ``L_t = (t / S)**beta``, whose density is ``l_beta(., t)``."""
    if not (t > 0 and math.isfinite(t)):
        raise DomainError(f"time must be positive and finite, got {t}")
    S = sample_stable(beta, rng, size)
    return (t / S) ** beta


# (count, mean, sum of squared deviations)
_Stats = tuple[int, float, float]


def _merge(a: _Stats, b: _Stats) -> _Stats:
    na, ma, qa = a
    nb, mb, qb = b
    n = na + nb
    delta = mb - ma
    return n, ma + delta * nb / n, qa + qb + delta * delta * na * nb / n


def _tree_reduce(parts: list[_Stats]) -> _Stats:
    while len(parts) > 1:
        merged = [_merge(parts[i], parts[i + 1]) for i in range(0, len(parts) - 1, 2)]
        if len(parts) % 2:
            merged.append(parts[-1])
        parts = merged
    return parts[0]


def _estimate(
    draw: Callable[[np.random.Generator, int], np.ndarray],
    n: int,
    rng,
    workers: int = 1,
) -> McEstimate:
    """Mean and standard error of ``draw`` over ``n`` samples in fixed chunks."""
    if n < 2:
        raise DomainError(f"need at least two samples, got {n}")
    stream = _as_stream(rng)
    sizes = [CHUNK] * (n // CHUNK)
    if n % CHUNK:
        sizes.append(n % CHUNK)

    def chunk_stats(index: int) -> _Stats:
        x = np.asarray(draw(stream.substream(index), sizes[index]), dtype=float)
        m = float(np.mean(x))
        return x.size, m, float(np.sum((x - m) ** 2))

    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(chunk_stats, range(len(sizes))))
    else:
        parts = [chunk_stats(i) for i in range(len(sizes))]
    count, mean, m2 = _tree_reduce(parts)
    std = math.sqrt(m2 / (count - 1))
    return McEstimate(mean, std / math.sqrt(count), count)


def mc_laplace_check(beta: float, lam: float, t: float, n: int, rng, *, workers: int = 1) -> McEstimate:
    """Estimate ``E[exp(-lam L_t)]``, to be compared with ``E_beta(-lam t**beta)``.

    ``lam = 0`` is accepted as the normalization limit and returns exactly 1.
    """
    if not (lam >= 0 and math.isfinite(lam)):
        raise DomainError(f"rate must be non-negative and finite, got {lam}")
    if n < 1000:
        raise DomainError(f"the Laplace check needs at least 1000 samples, got {n}")
    _check_stable_order(beta)
    if not t > 0:
        raise DomainError(f"time must be positive, got {t}")
    if lam == 0:
        return McEstimate(1.0, 0.0, n)
    return _estimate(lambda g, k: np.exp(-lam * sample_inverse_subordinator(beta, t, g, k)), n, rng, workers)


def mc_west(u0: float, beta: float, t: float, n: int, rng, *, workers: int = 1) -> McEstimate:
    """Estimate ``E[u(L_t)]`` with ``u`` the logistic curve started at ``u0``."""
    if not u0 > 0:
        raise DomainError(f"u0 must be positive, got {u0}")
    _check_stable_order(beta)
    return _estimate(lambda g, k: logistic_exact(u0, sample_inverse_subordinator(beta, t, g, k)), n, rng, workers)


def mc_double_integral(u0: float, beta: float, t: float, n: int, rng, *, workers: int = 1) -> McEstimate:
    """Estimate ``E[u(L) u(L')] - E[u(L)**2]`` with ``L, L'`` independent copies of ``L_t``."""
    if not u0 > 0:
        raise DomainError(f"u0 must be positive, got {u0}")
    _check_stable_order(beta)

    def draw(g: np.random.Generator, k: int) -> np.ndarray:
        a = logistic_exact(u0, sample_inverse_subordinator(beta, t, g, k))
        b = logistic_exact(u0, sample_inverse_subordinator(beta, t, g, k))
        return a * b - a * a

    return _estimate(draw, n, rng, workers)
