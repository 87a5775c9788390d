"""Independent reference computations used by the tests.

None of these share code with the package beyond the motion validator where
the comparison is explicitly "same validator".
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
from scipy.sparse.csgraph import dijkstra


# -- binomial tails ------------------------------------------------------------


def _log_pmf(n: int, p: float) -> np.ndarray:
    i = np.arange(n + 1)
    logc = np.array([math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1) for k in range(n + 1)])
    with np.errstate(divide="ignore", invalid="ignore"):
        return logc + i * np.log(p) + (n - i) * np.log1p(-p)


def upper_tail(k: int, n: int, p: float) -> float:
    """P(X >= k) for X ~ Binomial(n, p), by direct summation."""
    if p <= 0.0:
        return 1.0 if k <= 0 else 0.0
    if p >= 1.0:
        return 1.0
    return float(np.exp(_log_pmf(n, p)[k:]).sum())


def lower_tail(k: int, n: int, p: float) -> float:
    """P(X <= k)."""
    if p <= 0.0:
        return 1.0
    if p >= 1.0:
        return 1.0 if k >= n else 0.0
    return float(np.exp(_log_pmf(n, p)[: k + 1]).sum())


def _bisect(f, target: float, increasing: bool) -> float:
    lo, hi = 0.0, 1.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if (f(mid) < target) == increasing:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def clopper_pearson_tails(k: int, n: int, alpha: float) -> tuple[float, float]:
    """Exact interval by inverting the binomial tail sums."""
    lo = 0.0 if k == 0 else _bisect(lambda p: upper_tail(k, n, p), alpha / 2, increasing=True)
    hi = 1.0 if k == n else _bisect(lambda p: lower_tail(k, n, p), alpha / 2, increasing=False)
    return lo, hi


# -- median ranks ----------------------------------------------------------------


def enumerate_median_ranks(n: int, alpha: float) -> tuple[int, int] | None:
    """Among all 1 <= l < u <= n whose coverage P(l <= B <= u-1) >= 1 - alpha,
    pick the narrowest, then the highest coverage, then the smallest l."""
    pmf = [math.comb(n, i) for i in range(n + 1)]
    prefix = [0]
    for c in pmf:
        prefix.append(prefix[-1] + c)
    need = (1 - Fraction(alpha)) * (1 << n)
    best = None
    for l in range(1, n + 1):
        for u in range(l + 1, n + 1):
            cov = prefix[u] - prefix[l]
            if cov >= need:
                key = (u - l, -cov, l)
                if best is None or key < best[0]:
                    best = (key, (l, u))
                break  # larger u only widens the interval
    return None if best is None else best[1]


# -- shortest paths ---------------------------------------------------------------


def graph_shortest_cost(points: np.ndarray, start: int, goals, valid) -> float:
    """Dijkstra over the complete graph on ``points`` with ``valid(a, b)`` edges."""
    n = len(points)
    w = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            if valid(points[i], points[j]):
                d = float(np.linalg.norm(points[i] - points[j]))
                # csgraph treats 0 as "no edge"; coincident samples never occur here
                w[i, j] = w[j, i] = d
    dist = dijkstra(w, directed=False, indices=start)
    return float(min(dist[g] for g in goals))


def _segments_clear_of_box(p: np.ndarray, q: np.ndarray, lo, hi) -> np.ndarray:
    """For rows p -> q, True when the open segment avoids the open box (Liang-Barsky clip)."""
    d = q - p
    t0 = np.zeros(len(p))
    t1 = np.ones(len(p))
    for axis in range(p.shape[1]):
        for bound, sign in ((lo[axis], -1.0), (hi[axis], 1.0)):
            num = sign * (bound - p[:, axis])
            den = sign * d[:, axis]
            with np.errstate(divide="ignore", invalid="ignore"):
                t = num / den
            entering = den < 0
            leaving = den > 0
            parallel_out = (den == 0) & (num <= 0)
            t0 = np.where(entering, np.maximum(t0, t), t0)
            t1 = np.where(leaving, np.minimum(t1, t), t1)
            t1 = np.where(parallel_out, -1.0, t1)
    return ~(t1 > t0)


def grid_geodesic(boxes, start, goal, spacing: float = 0.01, reach: int = 10) -> float:
    """Shortest path in the unit square among axis-aligned boxes.

    Grid Dijkstra where each node connects to every node within ``reach``
    cells along a primitive (coprime) offset, so edge directions are dense
    enough to track straight lines closely.
    """
    from scipy.sparse import coo_matrix

    m = int(round(1.0 / spacing)) + 1
    xs = np.arange(m) * spacing
    gx, gy = np.meshgrid(xs, xs, indexing="ij")
    pts = np.stack([gx.ravel(), gy.ravel()], axis=1)
    free = np.ones(len(pts), dtype=bool)
    for lo, hi in boxes:
        inside = np.all((pts > np.asarray(lo)) & (pts < np.asarray(hi)), axis=1)
        free &= ~inside
    offsets = [
        (dx, dy)
        for dx in range(-reach, reach + 1)
        for dy in range(-reach, reach + 1)
        if (dx or dy) and math.gcd(abs(dx), abs(dy)) == 1
    ]
    ii, jj = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    rows, cols, weights = [], [], []
    for dx, dy in offsets:
        ni, nj = ii + dx, jj + dy
        ok = (ni >= 0) & (ni < m) & (nj >= 0) & (nj < m)
        a = (ii * m + jj)[ok]
        b = (ni * m + nj)[ok]
        keep = free[a] & free[b]
        a, b = a[keep], b[keep]
        clear = np.ones(len(a), dtype=bool)
        for lo, hi in boxes:
            clear &= _segments_clear_of_box(pts[a], pts[b], lo, hi)
        rows.append(a[clear])
        cols.append(b[clear])
        weights.append(np.full(clear.sum(), spacing * math.hypot(dx, dy)))
    graph = coo_matrix((np.concatenate(weights), (np.concatenate(rows), np.concatenate(cols))), shape=(len(pts),) * 2)
    s = int(round(start[0] / spacing)) * m + int(round(start[1] / spacing))
    g = int(round(goal[0] / spacing)) * m + int(round(goal[1] / spacing))
    return float(dijkstra(graph.tocsr(), indices=s)[g])
