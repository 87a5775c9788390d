import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fcit.errors import ContractViolation
from fcit.stats import (
    TrialRecord,
    beta_quantile,
    betainc,
    clopper_pearson,
    median,
    median_ci,
    median_ranks,
    summarize_records,
)
from oracles import clopper_pearson_tails, enumerate_median_ranks

INF = math.inf


def test_closed_form_k_zero():
    lo, hi = clopper_pearson(0, 5, 0.05)
    assert lo == 0.0
    assert hi == 1 - 0.025 ** (1 / 5)
    assert hi == pytest.approx(0.5218, abs=1e-4)


def test_closed_form_k_n():
    lo, hi = clopper_pearson(7, 7, 0.01)
    assert hi == 1.0
    assert lo == 0.005 ** (1 / 7)


def test_tail_sum_oracle_example():
    lo, hi = clopper_pearson(5, 10, 0.01)
    olo, ohi = clopper_pearson_tails(5, 10, 0.01)
    assert lo == pytest.approx(olo, abs=1e-6)
    assert hi == pytest.approx(ohi, abs=1e-6)
    assert lo + hi == pytest.approx(1.0, abs=1e-10)


def test_tail_sum_oracle_random_triples():
    rng = np.random.default_rng(0)
    for _ in range(100):
        n = int(rng.integers(1, 150))
        k = int(rng.integers(0, n + 1))
        alpha = float(rng.uniform(0.001, 0.3))
        got = clopper_pearson(k, n, alpha)
        want = clopper_pearson_tails(k, n, alpha)
        assert got == pytest.approx(want, abs=1e-6), (k, n, alpha)


@pytest.mark.parametrize("k,n,alpha", [(-1, 5, 0.05), (6, 5, 0.05), (0, 0, 0.05), (1, 5, 0.0), (1, 5, 1.0)])
def test_domain_errors(k, n, alpha):
    with pytest.raises(ContractViolation):
        clopper_pearson(k, n, alpha)


@given(st.integers(1, 120), st.sampled_from([0.01, 0.05, 0.1]))
def test_monotone_in_k(n, alpha):
    bounds = [clopper_pearson(k, n, alpha) for k in range(n + 1)]
    for (lo0, hi0), (lo1, hi1) in zip(bounds, bounds[1:]):
        assert lo1 >= lo0 and hi1 >= hi0
    for k, (lo, hi) in enumerate(bounds):
        assert 0.0 <= lo <= k / n <= hi <= 1.0


def test_coverage_simulation():
    rng = np.random.default_rng(42)
    n = 50
    for p in (0.1, 0.5, 0.9):
        ks = rng.binomial(n, p, size=10_000)
        table = {k: clopper_pearson(int(k), n, 0.01) for k in set(ks.tolist())}
        covered = np.mean([table[k][0] <= p <= table[k][1] for k in ks.tolist()])
        assert covered >= 0.985, (p, covered)


def test_betainc_known_values():
    assert betainc(1, 1, 0.3) == pytest.approx(0.3)
    assert betainc(2, 2, 0.5) == pytest.approx(0.5)
    # I_x(a, 1) = x**a
    assert betainc(3.5, 1, 0.7) == pytest.approx(0.7**3.5, rel=1e-12)
    assert beta_quantile(0.25, 1, 1) == pytest.approx(0.25, abs=1e-10)


# -- medians ------------------------------------------------------------------


def test_median_basic():
    assert median([3.0, 1.0, 2.0]) == 2.0
    assert median([4.0, 1.0, 2.0, 3.0]) == 2.5
    assert median([1.0, INF, INF]) == INF
    assert median([1.0, 2.0, INF, INF]) == INF


def test_median_ci_all_equal():
    assert median_ci([0.7] * 50) == (0.7, 0.7, 0.7)


def test_median_ci_single_value_is_flagged():
    with pytest.warns(UserWarning, match="cannot give"):
        assert median_ci([2.5]) == (2.5, 2.5, 2.5)


def test_median_ci_empty():
    with pytest.raises(ContractViolation):
        median_ci([])


def test_median_ranks_n100_match_enumeration():
    r = median_ranks(100, 0.01)
    assert r.attained
    assert (r.lower, r.upper) == enumerate_median_ranks(100, 0.01)
    assert r.coverage >= 0.99


@pytest.mark.parametrize("n", [6, 10, 17, 30, 51, 64, 99, 150])
@pytest.mark.parametrize("alpha", [0.01, 0.05])
def test_median_ranks_match_enumeration(n, alpha):
    r = median_ranks(n, alpha)
    expected = enumerate_median_ranks(n, alpha)
    assert ((r.lower, r.upper) if r.attained else None) == expected


def test_median_ci_bounds_are_sample_values():
    rng = np.random.default_rng(3)
    xs = rng.exponential(size=80).tolist() + [INF] * 10
    med, lo, hi = median_ci(xs)
    assert lo in xs and hi in xs
    assert lo <= med <= hi


def test_median_ci_infinite_upper_bound():
    xs = [1.0, 2.0, 3.0] + [INF] * 27 + [4.0] * 20
    _, lo, hi = median_ci(xs)
    assert hi == INF
    assert lo < INF


@given(st.lists(st.floats(0, 100) | st.just(INF), min_size=12, max_size=60))
def test_median_ci_order_property(xs):
    med, lo, hi = median_ci(xs)
    assert lo <= med <= hi
    assert lo in xs and hi in xs


# -- summary rows ------------------------------------------------------------------


def _rec(planner, solved, t=1.0, c=1.0, trial=0):
    if not solved:
        t = c = INF
    return TrialRecord("s", "p", planner, trial, 0, solved, t, c, t, c)


def test_unsolved_record_must_be_infinite():
    with pytest.raises(ContractViolation):
        TrialRecord("s", "p", "x", 0, 0, False, 1.0, INF, INF, INF)


def test_summary_all_solved():
    rows = summarize_records([_rec("a", True, trial=i) for i in range(10)])
    (row,) = rows
    assert row.solve_fraction.point == 1.0
    assert row.solve_fraction.hi == 1.0
    assert row.solve_fraction.lo == 0.005 ** (1 / 10)


def test_summary_all_unsolved_median_is_inf():
    (row,) = summarize_records([_rec("a", False, trial=i) for i in range(10)])
    assert row.c_init.point == INF
    assert row.solve_fraction.lo == 0.0


def test_summary_groups_by_planner_and_suite():
    recs = [_rec("a", True), _rec("b", False), _rec("a", False, trial=1)]
    rows = summarize_records(recs)
    assert [(r.planner, r.trials, r.solved) for r in rows] == [("a", 2, 1), ("b", 1, 0)]
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        summarize_records(recs)  # small-sample warnings are folded into the row flag
    assert not rows[0].median_coverage_attained
