"""Problem definitions, planner settings, and planner results."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from ..collide import DEFAULT_RESOLUTION, Environment, RobotModel, check_compatible, validate_motion, validate_state
from ..cspace import DEFAULT_BATCH_SIZE, DEFAULT_BLOCK_WIDTH, Bounds, as_config, distance
from ..errors import ContractViolation, ProblemSemanticError


@dataclass
class ProblemDef:
    bounds: Bounds
    robot: RobotModel
    env: Environment
    start: np.ndarray
    goals: list[np.ndarray]
    name: str = "problem"

    def __post_init__(self):
        self.start = as_config(self.start)
        self.goals = [as_config(g) for g in self.goals]
        self.check()

    @property
    def dim(self) -> int:
        return self.bounds.dim

    def check(self) -> None:
        """Raise :class:`ProblemSemanticError` unless the problem is well formed and solvable to set up."""
        d = self.bounds.dim
        if self.robot.config_dim != d:
            raise ProblemSemanticError(
                f"dimension mismatch: robot has {self.robot.config_dim} degrees of freedom but bounds are {d}-D"
            )
        try:
            check_compatible(self.robot, self.env)
        except ContractViolation as exc:
            raise ProblemSemanticError(str(exc)) from None
        if not self.goals:
            raise ProblemSemanticError("goals: at least one goal is required")
        for label, q in [("start", self.start)] + [(f"goals[{i}]", g) for i, g in enumerate(self.goals)]:
            if q.shape[0] != d:
                raise ProblemSemanticError(f"{label}: has {q.shape[0]} coordinates, expected {d}")
            if not self.bounds.contains(q):
                raise ProblemSemanticError(f"{label}: {q.tolist()} lies outside the bounds")
            if not validate_state(self.robot, self.env, q):
                raise ProblemSemanticError(f"{label}: configuration {q.tolist()} is in collision")


@dataclass
class PlannerSettings:
    """Knobs shared by all planners.

    Termination ("done") is the first of ``time_budget`` seconds,
    ``max_batches`` outer iterations, or reaching ``target_cost``. For the RRT
    planners one batch is ``batch_size`` iterations.
    """

    batch_size: int = DEFAULT_BATCH_SIZE
    time_budget: float | None = 1.0
    max_batches: int | None = None
    target_cost: float | None = None
    resolution: float = DEFAULT_RESOLUTION
    block_width: int = DEFAULT_BLOCK_WIDTH
    sampler: str = "pseudorandom"
    seed: int = 0
    connection: str = "fully_connected"
    radius: float | None = None
    rrt_range: float | None = None
    goal_bias: float = 0.05
    rewire_factor: float = 1.1
    shortcut_iterations: int = 100
    clock: str = "wall"

    def check(self) -> None:
        if self.time_budget is None and self.max_batches is None and self.target_cost is None:
            raise ContractViolation("settings need a time budget, a batch limit, or a target cost")
        if self.time_budget is not None and not self.time_budget > 0:
            raise ContractViolation("time budget must be positive")
        if self.max_batches is not None and self.max_batches < 1:
            raise ContractViolation("max_batches must be at least 1")
        if self.batch_size < 1:
            raise ContractViolation("batch size must be at least 1")
        if not self.resolution > 0:
            raise ContractViolation("resolution must be positive")
        if self.connection not in ("fully_connected", "r_disc"):
            raise ContractViolation(f"unknown connection mode {self.connection!r}")
        if self.connection == "r_disc" and not (self.radius is not None and self.radius > 0):
            raise ContractViolation("r-disc connection needs a positive radius")
        if self.clock not in ("wall", "work"):
            raise ContractViolation(f"unknown clock {self.clock!r}")


@dataclass
class Counters:
    edges_validated: int = 0
    states_checked: int = 0
    batches: int = 0
    queue_pops: int = 0
    samples: int = 0
    queue_entries: int = 0
    iterations: int = 0
    duplicate_validations: int = 0
    max_open: int = 0
    open_bound_violations: int = 0


# Cost of one unit of work in "work" seconds. The work clock makes timing a
# pure function of the run, so time budgets and reported times are reproducible.
WORK_SECONDS = {
    "states_checked": 2e-6,
    "queue_pops": 4e-6,
    "queue_entries": 5e-8,
    "samples": 1e-6,
    "iterations": 5e-6,
}


class Clock:
    def __init__(self, kind: str, counters: Counters):
        self.kind = kind
        self.counters = counters
        self._t0 = time.perf_counter()

    def __call__(self) -> float:
        if self.kind == "work":
            c = self.counters
            return sum(getattr(c, name) * w for name, w in WORK_SECONDS.items())
        return time.perf_counter() - self._t0


@dataclass
class PlanResult:
    planner: str
    solved: bool = False
    path: list[np.ndarray] = field(default_factory=list)
    cost: float = math.inf
    initial_time: float = math.inf
    initial_cost: float = math.inf
    final_time: float = math.inf
    trace: list[tuple[float, float]] = field(default_factory=list)
    batch_costs: list[float] = field(default_factory=list)
    counters: Counters = field(default_factory=Counters)
    elapsed: float = 0.0
    error: str | None = None

    def record(self, t: float, cost: float) -> None:
        """Log an improved incumbent; costs in the trace strictly decrease."""
        if not cost < self.cost:
            return
        if not self.trace:
            self.initial_time = t
            self.initial_cost = cost
        self.trace.append((t, cost))
        self.cost = cost
        self.final_time = t
        self.solved = True


class PlanningAborted(RuntimeError):
    """A planner stopped on an error; ``partial`` holds what it had so far."""

    def __init__(self, message: str, partial: PlanResult):
        super().__init__(message)
        self.partial = partial


def path_length(path: list[np.ndarray]) -> float:
    return sum(distance(a, b) for a, b in zip(path, path[1:]))


def check_path(problem: ProblemDef, path: list[np.ndarray], resolution: float) -> str | None:
    """Return ``None`` if ``path`` is a valid solution, else a description of the first defect."""
    if not path:
        return "empty path"
    if not np.array_equal(path[0], problem.start):
        return "path does not begin at the start"
    if not any(np.array_equal(path[-1], g) for g in problem.goals):
        return "path does not end at a goal"
    for i, (a, b) in enumerate(zip(path, path[1:])):
        if not validate_motion(problem.robot, problem.env, a, b, resolution):
            return f"segment {i} is in collision"
    return None

