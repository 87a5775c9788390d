"""FCIT*: informed search over a fully connected graph of batched samples.

Each outer iteration ("batch") restarts the informed search from the start
over every sample drawn so far, reusing the tree from the previous batch,
and then draws ``batch_size`` more samples. Within a batch, edges are
processed in order of ``f_hat = g(parent) + c_hat(parent, child) + h_hat(child)``
from an open queue that holds one edge per vertex; the rest of each vertex's
outgoing edges wait, sorted, in its local queue.
"""

from __future__ import annotations

import math
from dataclasses import replace
from typing import Callable

import numpy as np

from ..collide import Validator
from ..cspace import GoalSet, HeuristicCache, SampleStore, make_sampler, sample_batch
from ..errors import ContractViolation, SamplingStarved
from ..graph import InvalidEdgeCache, LocalQueue, OpenQueue, SearchTree, build_local_queue, next_best_edge, rewire
from .problem import Clock, PlannerSettings, PlanningAborted, PlanResult, ProblemDef

INF = math.inf

START_ID = 0
DEFAULT_RDISC_FRACTION = 0.5


class FCITStar:
    """One planning run. Call :meth:`solve` once.

    ``on_batch_end(planner)`` is invoked after every batch whose search ran to
    completion, before new samples are added. ``record_pops`` keeps the
    sequence of popped ``(parent, child)`` edges in :attr:`pops`, and
    ``check_invariants`` verifies the open-queue bound after every push.
    """

    name = "fcit"

    def __init__(
        self,
        problem: ProblemDef,
        settings: PlannerSettings,
        *,
        on_batch_end: Callable[["FCITStar"], None] | None = None,
        record_pops: bool = False,
        check_invariants: bool = False,
    ):
        settings.check()
        self.problem = problem
        self.settings = settings
        self.radius = settings.radius if settings.connection == "r_disc" else None
        self.on_batch_end = on_batch_end
        self.pops: list[tuple[int, int]] | None = [] if record_pops else None
        self.check_invariants = check_invariants

        self.result = PlanResult("fcit-rdisc" if self.radius is not None else "fcit")
        self.counters = self.result.counters
        self.clock = Clock(settings.clock, self.counters)

        self.store = SampleStore(problem.dim, settings.block_width)
        self.store.append(problem.start)
        self.goals = GoalSet(tuple(self.store.append(g) for g in problem.goals))
        self._goal_ids = set(self.goals)
        self.h_cache = HeuristicCache(np.array(problem.goals))
        self.h = self.h_cache.update(self.store)
        self.tree = SearchTree(START_ID, self.store.count)
        self.validator = Validator(problem.robot, problem.env, settings.resolution, settings.block_width)
        self.sampler = make_sampler(settings.sampler, problem.bounds, settings.seed)
        self.invalid = InvalidEdgeCache()
        self.known_valid: dict[int, set[int]] = {}
        self.validated_pairs: set[tuple[int, int]] | None = set() if check_invariants else None
        self.open = OpenQueue()
        self.queues: dict[int, LocalQueue] = {}
        self.batch = 0
        self.best_goal: int | None = None

    # -- termination --------------------------------------------------------

    def _out_of_time(self) -> bool:
        budget = self.settings.time_budget
        return budget is not None and self.clock() >= budget

    def _reached_target(self) -> bool:
        target = self.settings.target_cost
        return target is not None and self.result.cost <= target

    def _done(self) -> bool:
        limit = self.settings.max_batches
        return (
            self._out_of_time()
            or self._reached_target()
            or (limit is not None and self.batch >= limit)
        )

    # -- queue plumbing -----------------------------------------------------

    def _push_next(self, v: int) -> None:
        """Move ``v``'s next useful local edge into the open queue."""
        local = self.queues[v]
        edge = next_best_edge(v, self.tree, local, self.invalid)
        if edge is None:
            return
        c = edge[1]
        c_hat = float(local.c_hat[local.cursor - 1])
        self.open.push(v, c, c_hat, float(self.h[c]), float(self.tree.g[v]))
        n_open = len(self.open)
        if n_open > self.counters.max_open:
            self.counters.max_open = n_open
        if self.check_invariants and n_open > len(self.tree):
            self.counters.open_bound_violations += 1

    def _build_queue(self, v: int) -> None:
        self.queues[v] = build_local_queue(v, self.store, self.h, self.invalid, self.radius, self.batch)
        self.counters.queue_entries += len(self.queues[v].children)
        self.open.discard(v)

    def _expand(self, v: int) -> None:
        """(Re-)expand ``v``: give it a local queue for this batch and an open edge."""
        if v not in self.queues:
            self._build_queue(v)
            self._push_next(v)
        elif v not in self.open:
            self._push_next(v)

    # -- edge evaluation ----------------------------------------------------

    def _is_valid(self, p: int, c: int) -> bool:
        if c in self.known_valid.get(p, ()):
            return True
        if self.validated_pairs is not None:
            pair = (min(p, c), max(p, c))
            if pair in self.validated_pairs:
                self.counters.duplicate_validations += 1
            self.validated_pairs.add(pair)
        stats = self.validator.stats
        before = stats.states
        ok = self.validator.motion(self.store[p], self.store[c])
        self.counters.edges_validated += 1
        self.counters.states_checked += stats.states - before
        if ok:
            self.known_valid.setdefault(p, set()).add(c)
            self.known_valid.setdefault(c, set()).add(p)
        else:
            self.invalid.add(p, c)
        return ok

    def _update_incumbent(self, changed: set[int]) -> None:
        reached = changed & self._goal_ids
        if not reached:
            return
        g = self.tree.g
        v = min(reached, key=lambda u: (g[u], u))
        if g[v] < self.result.cost:
            self.best_goal = v
            self.result.record(self.clock(), float(g[v]))

    # -- main loop ----------------------------------------------------------

    def _search_batch(self) -> bool:
        """Run one batch's inner loop. Returns False if time ran out mid-batch."""
        tree, open_, h = self.tree, self.open, self.h
        g = tree.g
        open_.clear()
        self.queues.clear()
        self._expand(START_ID)
        while len(open_):
            if self._out_of_time():
                return False
            popped = open_.pop(tree)
            if popped is None:
                break
            p, c, f_hat, c_hat = popped
            self.counters.queue_pops += 1
            if self.pops is not None:
                self.pops.append((p, c))
            self._push_next(p)

            if tree.parent[c] == p:
                self._expand(c)
                continue
            best = self.result.cost
            if not f_hat <= best:
                open_.clear()
                continue
            g_p = g[p]
            if not g_p + c_hat <= g[c]:
                continue
            if not self._is_valid(p, c):
                continue
            # straight-line Euclidean edges: the true cost equals the estimate
            cost = c_hat
            if not g_p + cost + h[c] <= best:
                continue
            if not g_p + cost < g[c]:
                continue
            affected = rewire(tree, p, c, cost)
            for v in affected:
                open_.rekey(v, g[v])
            self._update_incumbent(affected)
            self._expand(c)
        return True

    def solve(self) -> PlanResult:
        result = self.result
        try:
            while not self._done():
                self.batch += 1
                self.counters.batches = self.batch
                if not self._search_batch():
                    break
                result.batch_costs.append(result.cost)
                if self.on_batch_end is not None:
                    self.on_batch_end(self)
                if self._done():
                    break
                self._add_samples()
        except SamplingStarved as exc:
            self._finish()
            result.error = str(exc)
            raise PlanningAborted(str(exc), result) from exc
        self._finish()
        return result

    def _add_samples(self) -> None:
        n = self.settings.batch_size
        ids = sample_batch(self.store, n, self.sampler, self.validator.states)
        self.counters.samples += len(ids)
        self.h = self.h_cache.update(self.store)
        self.tree.grow(self.store.count)

    def _finish(self) -> None:
        result = self.result
        result.elapsed = self.clock()
        if self.best_goal is not None:
            result.path = [self.store[v] for v in self.tree.path_to(self.best_goal)]


def fcit_plan(problem: ProblemDef, settings: PlannerSettings) -> PlanResult:
    return FCITStar(problem, settings).solve()


def fcit_plan_rdisc(problem: ProblemDef, settings: PlannerSettings) -> PlanResult:
    """FCIT* restricted to edges no longer than ``settings.radius``.

    Without an explicit radius, half the diameter of the bounds is used.
    """
    radius = settings.radius
    if radius is None:
        radius = DEFAULT_RDISC_FRACTION * problem.bounds.diameter
    if not radius > 0:
        raise ContractViolation("r-disc mode needs a positive radius")
    return FCITStar(problem, replace(settings, connection="r_disc", radius=radius)).solve()
