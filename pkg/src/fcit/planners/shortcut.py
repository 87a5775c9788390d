"""Randomized shortcutting of piecewise-linear paths."""

from __future__ import annotations

from typing import Callable

import numpy as np

from .problem import path_length

MotionCheck = Callable[[np.ndarray, np.ndarray], bool]


def _point_at(path: list[np.ndarray], cum: np.ndarray, s: float) -> tuple[int, np.ndarray]:
    """Segment index and position at arc length ``s``."""
    i = int(np.searchsorted(cum, s, side="right")) - 1
    i = min(max(i, 0), len(path) - 2)
    seg = cum[i + 1] - cum[i]
    t = 0.0 if seg == 0.0 else min(1.0, (s - cum[i]) / seg)
    a, b = path[i], path[i + 1]
    if t == 0.0:
        return i, a.copy()
    if t == 1.0:
        return i, b.copy()
    return i, a + t * (b - a)


def _drop_repeats(path: list[np.ndarray]) -> list[np.ndarray]:
    out = [path[0]]
    for q in path[1:]:
        if not np.array_equal(q, out[-1]):
            out.append(q)
    if len(out) == 1 and len(path) > 1:
        out.append(path[-1])
    return out


def _greedy_prune(path: list[np.ndarray], valid: MotionCheck) -> list[np.ndarray]:
    """From each kept vertex, jump to the farthest later vertex reachable in a straight line."""
    out = [path[0]]
    i = 0
    last = len(path) - 1
    while i < last:
        j = last
        while j > i + 1 and not valid(path[i], path[j]):
            j -= 1
        out.append(path[j])
        i = j
    return out


def shortcut(path: list[np.ndarray], valid: MotionCheck, rng: np.random.Generator, iterations: int = 100) -> list[np.ndarray]:
    """Shorten a valid path by splicing in straight segments between random points on it.

    Each attempt picks two arc-length positions uniformly; the splice is kept
    only if every new segment passes ``valid`` and the path gets no longer.
    A greedy vertex-skipping pass runs before and after the random attempts.
    With ``iterations == 0`` the path is returned unchanged.
    """
    path = [np.asarray(q, dtype=float) for q in path]
    if iterations <= 0 or len(path) < 3:
        return path
    path = _keep_shorter(path, _greedy_prune(path, valid))
    for _ in range(iterations):
        if len(path) < 3:
            break
        cum = np.concatenate([[0.0], np.cumsum([np.linalg.norm(b - a) for a, b in zip(path, path[1:])])])
        s1, s2 = np.sort(rng.uniform(0.0, cum[-1], size=2))
        i1, p1 = _point_at(path, cum, s1)
        i2, p2 = _point_at(path, cum, s2)
        if i1 == i2:
            continue
        # the partial segments get their own discretisation, so they are re-checked too
        if not (valid(path[i1], p1) and valid(p1, p2) and valid(p2, path[i2 + 1])):
            continue
        candidate = _drop_repeats(path[: i1 + 1] + [p1, p2] + path[i2 + 1 :])
        path = _keep_shorter(path, candidate)
    return _keep_shorter(path, _greedy_prune(path, valid))


def _keep_shorter(old: list[np.ndarray], new: list[np.ndarray]) -> list[np.ndarray]:
    return new if path_length(new) <= path_length(old) else old
