"""Confidence intervals for benchmark summaries.

Success rates get exact (Clopper-Pearson) binomial intervals; medians get
distribution-free intervals whose bounds are order statistics of the data.
Unsolved trials enter medians as ``inf`` rather than being dropped.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Sequence

from .errors import ContractViolation

BISECTION_TOL = 1e-12


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (modified Lentz)."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    d = 1.0 / (d if abs(d) > tiny else tiny)
    h = d
    for m in range(1, 10_000):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > tiny else tiny)
        c = 1.0 + aa / c
        c = c if abs(c) > tiny else tiny
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > tiny else tiny)
        c = 1.0 + aa / c
        c = c if abs(c) > tiny else tiny
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            break
    return h


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function ``I_x(a, b)`` for ``a, b > 0``."""
    if not (a > 0 and b > 0):
        raise ContractViolation("betainc needs positive shape parameters")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    log_front = math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log1p(-x)
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def beta_quantile(q: float, a: float, b: float, tol: float = BISECTION_TOL) -> float:
    """Inverse of ``betainc`` in ``x`` by bisection."""
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if betainc(a, b, mid) < q:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@lru_cache(maxsize=4096)
def clopper_pearson(k: int, n: int, alpha: float = 0.01) -> tuple[float, float]:
    """Exact two-sided ``1 - alpha`` interval for a binomial proportion ``k / n``."""
    if not (isinstance(k, int) and isinstance(n, int)) or n < 1 or not 0 <= k <= n:
        raise ContractViolation(f"need integers 0 <= k <= n with n >= 1, got k={k}, n={n}")
    if not 0.0 < alpha < 1.0:
        raise ContractViolation(f"alpha must lie in (0, 1), got {alpha}")
    half = alpha / 2.0
    if k == 0:
        return 0.0, 1.0 - half ** (1.0 / n)
    if k == n:
        return half ** (1.0 / n), 1.0
    return beta_quantile(half, k, n - k + 1), beta_quantile(1.0 - half, k + 1, n - k)


class RankInterval(NamedTuple):
    lower: int  # 1-based order-statistic ranks
    upper: int
    coverage: float
    attained: bool


def _coverage(counts: list[int], l: int, u: int) -> int:
    # numerator over 2**n of P(l <= B <= u - 1), B ~ Binomial(n, 1/2)
    return sum(counts[l:u])


@lru_cache(maxsize=1024)
def median_ranks(n: int, alpha: float = 0.01) -> RankInterval:
    """Narrowest order-statistic ranks ``(l, u)`` with ``P(x_(l) <= median < x_(u)) >= 1 - alpha``.

    Starts from the widest-coverage symmetric pair and tries dropping one rank
    from either end; ties keep the smaller lower rank. When no pair reaches
    the requested coverage (tiny ``n``), the extreme ranks are returned with
    ``attained=False``.
    """
    if n < 1:
        raise ContractViolation("need at least one value")
    if not 0.0 < alpha < 1.0:
        raise ContractViolation(f"alpha must lie in (0, 1), got {alpha}")
    counts = [math.comb(n, i) for i in range(n + 1)]
    total = 1 << n
    need = (1 - Fraction(alpha)) * total
    best = None
    for l in range(1, (n + 1) // 2 + 1):
        u = n + 1 - l
        if u <= l:
            break
        if _coverage(counts, l, u) >= need:
            best = (l, u)
        else:
            break
    if best is None:
        l, u = 1, n
        return RankInterval(l, u, _coverage(counts, l, u) / total, False)
    l, u = best
    narrower = [(l, u - 1), (l + 1, u)]
    ok = [(c, w) for w in narrower if w[0] < w[1] and (c := _coverage(counts, *w)) >= need]
    if ok:
        top = max(c for c, _ in ok)
        l, u = next(w for c, w in ok if c == top)
    return RankInterval(l, u, _coverage(counts, l, u) / total, True)


def median(values: Sequence[float]) -> float:
    xs = sorted(values)
    n = len(xs)
    if n == 0:
        raise ContractViolation("median of an empty sequence")
    mid = n // 2
    if n % 2:
        return xs[mid]
    a, b = xs[mid - 1], xs[mid]
    if math.isinf(a) or math.isinf(b):
        return b if math.isinf(b) else a
    return (a + b) / 2.0


def median_ci(values: Sequence[float], alpha: float = 0.01) -> tuple[float, float, float]:
    """``(median, lo, hi)``; the bounds are order statistics of ``values``.

    ``inf`` entries are allowed and sort last. A :class:`UserWarning` is
    emitted when there are too few values for the requested coverage.
    """
    xs = sorted(values)
    if not xs:
        raise ContractViolation("median_ci needs at least one value")
    ranks = median_ranks(len(xs), alpha)
    if not ranks.attained:
        warnings.warn(
            f"{len(xs)} values cannot give {100 * (1 - alpha):g}% median coverage "
            f"(best is {100 * ranks.coverage:.1f}%)",
            stacklevel=2,
        )
    return median(xs), xs[ranks.lower - 1], xs[ranks.upper - 1]


@dataclass(frozen=True)
class TrialRecord:
    """One planner run on one problem. Unsolved runs carry ``inf`` times and costs."""

    suite: str
    problem: str
    planner: str
    trial: int
    seed: int
    solved: bool
    t_init_ms: float
    c_init: float
    t_final_ms: float
    c_final: float
    edges_validated: int = 0
    states_checked: int = 0
    batches: int = 0

    def __post_init__(self):
        if not self.solved and not all(math.isinf(v) for v in (self.t_init_ms, self.c_init, self.t_final_ms, self.c_final)):
            raise ContractViolation("unsolved trials must record infinite times and costs")


@dataclass(frozen=True)
class Estimate:
    point: float
    lo: float
    hi: float


@dataclass(frozen=True)
class SummaryRow:
    planner: str
    suite: str
    trials: int
    solved: int
    solve_fraction: Estimate
    t_init_ms: Estimate
    c_init: Estimate
    c_final: Estimate
    median_coverage_attained: bool


def summarize_records(records: Sequence[TrialRecord], alpha: float = 0.01) -> list[SummaryRow]:
    """One row per (planner, suite), in order of first appearance."""
    groups: dict[tuple[str, str], list[TrialRecord]] = {}
    for r in records:
        groups.setdefault((r.planner, r.suite), []).append(r)
    rows = []
    for (planner, suite), rs in groups.items():
        n = len(rs)
        k = sum(r.solved for r in rs)
        lo, hi = clopper_pearson(k, n, alpha)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            medians = [Estimate(*median_ci([getattr(r, f) for r in rs], alpha)) for f in ("t_init_ms", "c_init", "c_final")]
        rows.append(
            SummaryRow(planner, suite, n, k, Estimate(k / n, lo, hi), *medians, median_ranks(n, alpha).attained)
        )
    return rows
