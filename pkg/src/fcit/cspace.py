"""Configuration spaces, the Euclidean cost model, and batch sampling.

Configurations are plain 1-D float64 numpy arrays. Sampled configurations
live in a :class:`SampleStore`, an append-only structure-of-arrays buffer
addressed by integer id.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.stats import qmc

from .errors import ContractViolation, SamplingStarved

DEFAULT_BLOCK_WIDTH = 8
DEFAULT_BATCH_SIZE = 100
ATTEMPTS_PER_SAMPLE = 10_000

StateValidity = Callable[[np.ndarray], np.ndarray]


def as_config(values: Sequence[float] | np.ndarray) -> np.ndarray:
    q = np.asarray(values, dtype=np.float64)
    if q.ndim != 1:
        raise ContractViolation(f"config must be 1-D, got shape {q.shape}")
    if not np.all(np.isfinite(q)):
        raise ContractViolation("config has non-finite coordinates")
    return q


@dataclass(frozen=True)
class Bounds:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=np.float64)
        hi = np.asarray(self.upper, dtype=np.float64)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ContractViolation("bounds lower/upper must be 1-D arrays of equal length")
        if not np.all(lo < hi):
            raise ContractViolation("bounds require lower[i] < upper[i] for every axis")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.upper - self.lower))

    def contains(self, q: np.ndarray) -> bool:
        return bool(np.all(q >= self.lower) and np.all(q <= self.upper))


def distance(a: np.ndarray, b: np.ndarray) -> float:
    """Euclidean length of the straight segment from ``a`` to ``b``.

    This is both the true edge cost and its admissible estimate.
    """
    if len(a) != len(b):
        raise ContractViolation(f"dimension mismatch: {len(a)} vs {len(b)}")
    return math.dist(a, b)


def distances_from(x: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Vectorised :func:`distance` from ``x`` to every row of ``points`` (N, d)."""
    diff = points - x
    return np.sqrt(np.einsum("ij,ij->i", diff, diff))


def interpolate(a: np.ndarray, b: np.ndarray, t: float) -> np.ndarray:
    if len(a) != len(b):
        raise ContractViolation(f"dimension mismatch: {len(a)} vs {len(b)}")
    if not 0.0 <= t <= 1.0:
        raise ContractViolation(f"interpolation parameter {t} outside [0, 1]")
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    # exact at the endpoints, which a + t*(b - a) does not guarantee for t == 1
    if t == 0.0:
        return a.copy()
    if t == 1.0:
        return b.copy()
    return a + t * (b - a)


def interpolate_many(a: np.ndarray, b: np.ndarray, ts: np.ndarray) -> np.ndarray:
    """Rows ``a + t*(b - a)`` for every ``t`` in ``ts``, with exact endpoints."""
    out = a[None, :] + ts[:, None] * (b - a)[None, :]
    out[ts == 0.0] = a
    out[ts == 1.0] = b
    return out


class SampleStore:
    """Append-only store of valid configurations.

    Coordinates are kept axis-major, ``coords[axis, id]``, with the capacity
    padded to a multiple of the block width so that any ``block_width``
    consecutive ids can be read as parallel lanes of one coordinate.
    """

    def __init__(self, dim: int, block_width: int = DEFAULT_BLOCK_WIDTH, capacity: int = 256):
        if dim < 1:
            raise ContractViolation("dimension must be positive")
        if block_width < 1 or block_width & (block_width - 1):
            raise ContractViolation("block width must be a power of two")
        self.dim = dim
        self.block_width = block_width
        self._coords = np.zeros((dim, self._aligned(capacity)))
        self.count = 0

    def _aligned(self, n: int) -> int:
        w = self.block_width
        return max(w, -(-n // w) * w)

    def __len__(self) -> int:
        return self.count

    def _reserve(self, extra: int) -> None:
        need = self.count + extra
        cap = self._coords.shape[1]
        if need <= cap:
            return
        new_cap = self._aligned(max(need, 2 * cap))
        grown = np.zeros((self.dim, new_cap))
        grown[:, : self.count] = self._coords[:, : self.count]
        self._coords = grown

    def append(self, q: np.ndarray) -> int:
        q = as_config(q)
        if q.shape[0] != self.dim:
            raise ContractViolation(f"config has dimension {q.shape[0]}, store has {self.dim}")
        self._reserve(1)
        self._coords[:, self.count] = q
        self.count += 1
        return self.count - 1

    def extend(self, qs: np.ndarray) -> list[int]:
        qs = np.asarray(qs, dtype=np.float64).reshape(-1, self.dim)
        self._reserve(len(qs))
        first = self.count
        self._coords[:, first : first + len(qs)] = qs.T
        self.count += len(qs)
        return list(range(first, self.count))

    def __getitem__(self, i: int) -> np.ndarray:
        if not 0 <= i < self.count:
            raise IndexError(i)
        return self._coords[:, i].copy()

    @property
    def points(self) -> np.ndarray:
        """Read-only (count, dim) view of all stored configurations."""
        view = self._coords[:, : self.count].T
        view.flags.writeable = False
        return view

    def lanes(self, first: int) -> np.ndarray:
        """The (dim, block_width) block starting at ``first`` (must be block aligned)."""
        if first % self.block_width:
            raise ContractViolation("lane reads must start on a block boundary")
        return self._coords[:, first : first + self.block_width]


@dataclass(frozen=True)
class GoalSet:
    goal_ids: tuple[int, ...]

    def __post_init__(self):
        if not self.goal_ids:
            raise ContractViolation("goal set must be nonempty")

    def __iter__(self):
        return iter(self.goal_ids)

    def __len__(self):
        return len(self.goal_ids)


def heuristic_cost_to_go(x: np.ndarray, goals: GoalSet, store: SampleStore) -> float:
    if len(goals) == 0:
        raise ContractViolation("goal set must be nonempty")
    return min(distance(x, store[g]) for g in goals)


def heuristic_to_goals(points: np.ndarray, goal_points: np.ndarray) -> np.ndarray:
    """Cost-to-go estimate for each row of ``points`` given goal rows."""
    best = np.full(len(points), np.inf)
    for g in goal_points:
        np.minimum(best, distances_from(g, points), out=best)
    return best


class _BufferedSampler:
    """Candidate stream with look-ahead, so that rejected tails are not lost."""

    def __init__(self, bounds: Bounds):
        self.bounds = bounds
        self._buffer = np.empty((0, bounds.dim))

    def _generate(self, count: int) -> np.ndarray:
        raise NotImplementedError

    def peek(self, count: int) -> np.ndarray:
        short = count - len(self._buffer)
        if short > 0:
            self._buffer = np.vstack([self._buffer, self._generate(short)])
        return self._buffer[:count]

    def advance(self, count: int) -> None:
        self._buffer = self._buffer[count:]


class UniformSampler(_BufferedSampler):
    kind = "pseudorandom"

    def __init__(self, bounds: Bounds, rng: np.random.Generator):
        super().__init__(bounds)
        self.rng = rng

    def _generate(self, count: int) -> np.ndarray:
        return self.rng.uniform(self.bounds.lower, self.bounds.upper, size=(count, self.bounds.dim))


class HaltonSampler(_BufferedSampler):
    """Unscrambled Halton sequence scaled into the bounds (index 0 skipped)."""

    kind = "halton"

    def __init__(self, bounds: Bounds):
        super().__init__(bounds)
        self._engine = qmc.Halton(d=bounds.dim, scramble=False)
        self._engine.fast_forward(1)

    def _generate(self, count: int) -> np.ndarray:
        unit = self._engine.random(count)
        return qmc.scale(unit, self.bounds.lower, self.bounds.upper)


def make_sampler(kind: str, bounds: Bounds, seed: int) -> _BufferedSampler:
    if kind == "pseudorandom":
        return UniformSampler(bounds, np.random.default_rng(seed))
    if kind == "halton":
        return HaltonSampler(bounds)
    raise ContractViolation(f"unknown sampler kind {kind!r}")


def sample_batch(
    store: SampleStore,
    n: int,
    sampler: _BufferedSampler,
    validity: StateValidity,
    attempts_per_sample: int = ATTEMPTS_PER_SAMPLE,
) -> list[int]:
    """Append ``n`` valid samples by rejection; return their ids in order.

    ``validity`` maps an (m, d) array of candidates to a boolean mask.
    Only the candidates up to the last accepted one are consumed, so the
    underlying stream continues seamlessly into the next call.
    """
    if n < 1:
        raise ContractViolation("batch size must be at least 1")
    budget = attempts_per_sample * n
    accepted: list[np.ndarray] = []
    attempts = 0
    need = n
    while need > 0:
        if attempts >= budget:
            raise SamplingStarved(n, n - need, attempts)
        chunk = min(max(2 * need, 16), budget - attempts)
        candidates = sampler.peek(chunk)
        ok = np.flatnonzero(validity(candidates))
        if len(ok) >= need:
            take = ok[:need]
            consumed = int(take[-1]) + 1
        else:
            take = ok
            consumed = chunk
        accepted.append(candidates[take].copy())
        sampler.advance(consumed)
        attempts += consumed
        need -= len(take)
    return store.extend(np.vstack(accepted))


@dataclass
class HeuristicCache:
    """Per-sample cost-to-go estimates, extended as the store grows."""

    goal_points: np.ndarray
    values: np.ndarray = field(default_factory=lambda: np.empty(0))

    def update(self, store: SampleStore) -> np.ndarray:
        have = len(self.values)
        if have < store.count:
            fresh = heuristic_to_goals(store.points[have:], self.goal_points)
            self.values = np.concatenate([self.values, fresh])
        return self.values
