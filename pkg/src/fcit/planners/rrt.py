"""Baseline tree planners: RRT-Connect (with shortcutting) and RRT*."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..collide import Validator
from ..cspace import distance, distances_from, make_sampler
from .problem import Clock, PlannerSettings, PlanResult, ProblemDef, path_length
from .shortcut import shortcut

DEFAULT_RANGE_FRACTION = 0.1


def _range(problem: ProblemDef, settings: PlannerSettings) -> float:
    if settings.rrt_range is not None:
        return settings.rrt_range
    return DEFAULT_RANGE_FRACTION * problem.bounds.diameter


def _steer(a: np.ndarray, b: np.ndarray, step: float) -> np.ndarray:
    d = distance(a, b)
    if d <= step:
        return b.copy()
    return a + (step / d) * (b - a)


class _Stream:
    """Row-at-a-time view of a buffered sampler."""

    def __init__(self, sampler, chunk: int = 64):
        self.sampler = sampler
        self.chunk = chunk
        self._rows: list[np.ndarray] = []

    def next(self) -> np.ndarray:
        if not self._rows:
            block = self.sampler.peek(self.chunk).copy()
            self.sampler.advance(self.chunk)
            self._rows = list(block[::-1])
        return self._rows.pop()


@dataclass
class _Tree:
    dim: int
    points: np.ndarray = None
    parent: list[int] = field(default_factory=list)
    count: int = 0

    def __post_init__(self):
        self.points = np.empty((64, self.dim))

    def add(self, q: np.ndarray, parent: int) -> int:
        if self.count == len(self.points):
            self.points = np.vstack([self.points, np.empty_like(self.points)])
        self.points[self.count] = q
        self.parent.append(parent)
        self.count += 1
        return self.count - 1

    def nearest(self, q: np.ndarray) -> int:
        return int(np.argmin(distances_from(q, self.points[: self.count])))

    def branch(self, i: int) -> list[np.ndarray]:
        out = []
        while i >= 0:
            out.append(self.points[i].copy())
            i = self.parent[i]
        return out


class _Budget:
    def __init__(self, settings: PlannerSettings, clock: Clock):
        self.settings = settings
        self.clock = clock
        limit = settings.max_batches
        self.max_iterations = None if limit is None else limit * settings.batch_size

    def done(self, iterations: int, cost: float = math.inf) -> bool:
        s = self.settings
        if s.time_budget is not None and self.clock() >= s.time_budget:
            return True
        if self.max_iterations is not None and iterations >= self.max_iterations:
            return True
        return s.target_cost is not None and cost <= s.target_cost


def rrt_connect(problem: ProblemDef, settings: PlannerSettings) -> PlanResult:
    """Bidirectional RRT with extend/connect; the first path found is shortcut and returned."""
    settings.check()
    result = PlanResult("rrtc")
    counters = result.counters
    clock = Clock(settings.clock, counters)
    budget = _Budget(settings, clock)
    validator = Validator(problem.robot, problem.env, settings.resolution, settings.block_width)
    stream = _Stream(make_sampler(settings.sampler, problem.bounds, settings.seed))
    rng = np.random.default_rng(settings.seed + 1)
    step = _range(problem, settings)

    def motion(a, b) -> bool:
        before = validator.stats.states
        ok = validator.motion(a, b)
        counters.edges_validated += 1
        counters.states_checked += validator.stats.states - before
        return ok

    goal = problem.goals[0]
    start_tree, goal_tree = _Tree(problem.dim), _Tree(problem.dim)
    start_tree.add(problem.start, -1)
    goal_tree.add(goal, -1)
    trees = [start_tree, goal_tree]
    found = None
    while not budget.done(counters.iterations):
        counters.iterations += 1
        counters.samples += 1
        q_rand = stream.next()
        a, b = trees
        near = a.nearest(q_rand)
        q_new = _steer(a.points[near], q_rand, step)
        if not motion(a.points[near], q_new):
            trees.reverse()
            continue
        new = a.add(q_new, near)
        # connect the other tree toward q_new until blocked or joined
        j = b.nearest(q_new)
        while True:
            q_next = _steer(b.points[j], q_new, step)
            if not motion(b.points[j], q_next):
                break
            j = b.add(q_next, j)
            if np.array_equal(q_next, q_new):
                found = (new, j) if a is start_tree else (j, new)
                break
        if found:
            break
        trees.reverse()
    if found:
        i_start, i_goal = found
        raw = start_tree.branch(i_start)[::-1] + goal_tree.branch(i_goal)[1:]
        path = shortcut(raw, motion, rng, settings.shortcut_iterations)
        t = clock()
        result.path = path
        result.record(t, path_length(path))
    result.counters.batches = math.ceil(counters.iterations / settings.batch_size)
    result.elapsed = clock()
    return result


def _ball_radius(problem: ProblemDef, settings: PlannerSettings, n: int) -> float:
    d = problem.dim
    volume = float(np.prod(problem.bounds.upper - problem.bounds.lower))
    unit_ball = math.pi ** (d / 2) / math.gamma(d / 2 + 1)
    gamma = 2.0 * (1.0 + 1.0 / d) ** (1.0 / d) * (volume / unit_ball) ** (1.0 / d)
    return settings.rewire_factor * gamma * (math.log(n) / n) ** (1.0 / d)


def rrt_star(problem: ProblemDef, settings: PlannerSettings) -> PlanResult:
    """RRT* with goal biasing and a shrinking rewiring ball, scaled by ``rewire_factor``."""
    settings.check()
    result = PlanResult("rrtstar")
    counters = result.counters
    clock = Clock(settings.clock, counters)
    budget = _Budget(settings, clock)
    validator = Validator(problem.robot, problem.env, settings.resolution, settings.block_width)
    stream = _Stream(make_sampler(settings.sampler, problem.bounds, settings.seed))
    rng = np.random.default_rng(settings.seed + 1)
    step = _range(problem, settings)

    def motion(a, b) -> bool:
        before = validator.stats.states
        ok = validator.motion(a, b)
        counters.edges_validated += 1
        counters.states_checked += validator.stats.states - before
        return ok

    tree = _Tree(problem.dim)
    tree.add(problem.start, -1)
    cost = [0.0]
    edge = [0.0]
    children: list[set[int]] = [set()]
    goal_nodes: dict[int, int] = {}  # goal index -> tree node

    def reparent(v: int, p: int, c: float) -> None:
        children[tree.parent[v]].discard(v)
        tree.parent[v] = p
        children[p].add(v)
        edge[v] = c
        stack = [v]
        while stack:
            u = stack.pop()
            cost[u] = cost[tree.parent[u]] + edge[u]
            stack.extend(children[u])

    best_goal = None
    while not budget.done(counters.iterations, result.cost):
        counters.iterations += 1
        goal_index = None
        if rng.random() < settings.goal_bias:
            goal_index = int(rng.integers(len(problem.goals)))
            q_rand = problem.goals[goal_index]
        else:
            counters.samples += 1
            q_rand = stream.next()
        pts = tree.points[: tree.count]
        near_id = tree.nearest(q_rand)
        q_new = _steer(pts[near_id], q_rand, step)
        reaches_goal = goal_index is not None and np.array_equal(q_new, q_rand)
        if reaches_goal and goal_index in goal_nodes:
            continue
        if not motion(pts[near_id], q_new):
            continue
        radius = min(_ball_radius(problem, settings, tree.count + 1), step)
        dists = distances_from(q_new, pts)
        near = np.flatnonzero(dists <= radius)
        # choose the cheapest valid parent, testing candidates in cost order
        parent, parent_edge = near_id, float(dists[near_id])
        candidates = sorted(((cost[i] + float(dists[i]), int(i)) for i in near), key=lambda x: x)
        for total, i in candidates:
            if total >= cost[parent] + parent_edge:
                break
            if i == near_id or motion(pts[i], q_new):
                parent, parent_edge = i, float(dists[i])
                break
        new = tree.add(q_new, parent)
        cost.append(cost[parent] + parent_edge)
        edge.append(parent_edge)
        children.append(set())
        children[parent].add(new)
        if reaches_goal:
            goal_nodes[goal_index] = new
        for i in near:
            i = int(i)
            if i == parent:
                continue
            c = float(dists[i])
            if cost[new] + c < cost[i] and motion(q_new, tree.points[i]):
                reparent(i, new, c)
        if goal_nodes:
            g_best = min(goal_nodes.values(), key=lambda v: (cost[v], v))
            if cost[g_best] < result.cost:
                best_goal = g_best
                result.record(clock(), cost[g_best])
    if best_goal is not None:
        result.path = tree.branch(best_goal)[::-1]
    result.counters.batches = math.ceil(counters.iterations / settings.batch_size)
    result.elapsed = clock()
    return result
