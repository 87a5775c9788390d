"""Built-in desk-scale problem suites and suite manifests."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from ..collide import Box, Capsule, Environment, PlanarArm, PointRobot, Sphere
from ..cspace import Bounds
from ..errors import ProblemParseError, ProblemSemanticError
from ..planners.problem import ProblemDef
from .problems import write_problem

DEFAULT_TIME_BUDGET = 1.0
DEFAULT_TRIALS = 5

UNIT_2D = Bounds(np.zeros(2), np.ones(2))
UNIT_3D = Bounds(np.zeros(3), np.ones(3))

WALL_GAP_TOP = 0.8


def empty(index: int, rng: np.random.Generator) -> ProblemDef:
    start = (0.1, 0.5) if index == 0 else tuple(rng.uniform(0.05, 0.3, 2))
    goal = (0.9, 0.5) if index == 0 else tuple(rng.uniform(0.7, 0.95, 2))
    return ProblemDef(UNIT_2D, PointRobot(2), Environment([], dim=2), start, [goal], name=f"empty-{index}")


def wall_gap(index: int, rng: np.random.Generator) -> ProblemDef:
    """A wall across the unit square with one gap along the top edge.

    Problem 0 is the canonical world; later problems move the wall top down.
    """
    top = WALL_GAP_TOP if index == 0 else float(rng.uniform(0.6, 0.85))
    wall = Box((0.45, -1.0), (0.55, top))
    return ProblemDef(UNIT_2D, PointRobot(2), Environment([wall]), (0.1, 0.5), [(0.9, 0.5)], name=f"wall-gap-{index}")


def random_spheres(index: int, rng: np.random.Generator, count: int = 40) -> ProblemDef:
    start, goal = np.array([0.05, 0.05]), np.array([0.95, 0.95])
    spheres = []
    while len(spheres) < count:
        c = rng.uniform(0.0, 1.0, 2)
        r = float(rng.uniform(0.03, 0.08))
        if min(np.linalg.norm(c - start), np.linalg.norm(c - goal)) > r + 0.02:
            spheres.append(Sphere(tuple(c), r))
    return ProblemDef(UNIT_2D, PointRobot(2), Environment(spheres), start, [goal], name=f"random-spheres-{index}")


def narrow_passage(index: int, rng: np.random.Generator) -> ProblemDef:
    """3-D point robot; a slab across the cube with a small square hole."""
    half = 0.03 if index == 0 else float(rng.uniform(0.025, 0.05))
    c = 0.5 if index == 0 else float(rng.uniform(0.3, 0.7))
    x0, x1 = 0.45, 0.55
    lo, hi = c - half, c + half
    slab = [
        Box((x0, -0.1, -0.1), (x1, lo, 1.1)),
        Box((x0, hi, -0.1), (x1, 1.1, 1.1)),
        Box((x0, lo - 0.01, -0.1), (x1, hi + 0.01, lo)),
        Box((x0, lo - 0.01, hi), (x1, hi + 0.01, 1.1)),
    ]
    return ProblemDef(
        UNIT_3D, PointRobot(3), Environment(slab), (0.1, 0.2, 0.2), [(0.9, 0.8, 0.2)], name=f"narrow-passage-{index}"
    )


ARM_LINKS = (0.5, 0.4, 0.3)


def arm_shelf(index: int, rng: np.random.Generator) -> ProblemDef:
    """Three-link planar arm moving its hand from below a shelf board to above it."""
    arm = PlanarArm(ARM_LINKS, link_radius=0.02)
    height = 0.35 if index == 0 else float(rng.uniform(0.3, 0.45))
    shelf = [
        Box((0.55, height), (1.4, height + 0.05)),
        Box((1.35, -0.6), (1.45, height)),
        Sphere((-0.7, 0.3), 0.15),
    ]
    bounds = Bounds(np.full(3, -math.pi), np.full(3, math.pi))
    start = (-0.2, 0.3, 0.3)
    goal = (1.2, -0.5, -0.6)
    return ProblemDef(bounds, arm, Environment(shelf), start, [goal], name=f"arm-shelf-{index}")


def annulus(index: int, rng: np.random.Generator, segments: int = 16) -> ProblemDef:
    """Infeasible: the goal sits inside a closed ring of capsules."""
    ring_r, thick = 0.15, 0.05
    angles = np.linspace(0.0, 2.0 * math.pi, segments + 1)
    pts = [(0.5 + ring_r * math.cos(a), 0.5 + ring_r * math.sin(a)) for a in angles]
    ring = [Capsule(pts[i], pts[i + 1], thick) for i in range(segments)]
    return ProblemDef(UNIT_2D, PointRobot(2), Environment(ring), (0.1, 0.1), [(0.5, 0.5)], name=f"annulus-{index}")


SUITES: dict[str, tuple[Callable[[int, np.random.Generator], ProblemDef], int]] = {
    "empty": (empty, 1),
    "wall-gap": (wall_gap, 1),
    "random-spheres": (random_spheres, 3),
    "narrow-passage": (narrow_passage, 1),
    "arm-shelf": (arm_shelf, 1),
    "annulus": (annulus, 1),
}


def generate(suite: str, count: int | None = None, seed: int = 0) -> list[ProblemDef]:
    if suite not in SUITES:
        raise KeyError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    make, default_count = SUITES[suite]
    rng = np.random.default_rng(seed)
    return [make(i, rng) for i in range(default_count if count is None else count)]


@dataclass
class SuiteManifest:
    name: str
    problems: list[Path]
    time_budget: float = DEFAULT_TIME_BUDGET
    trials: int = DEFAULT_TRIALS
    seed_base: int = 0

    def to_dict(self, relative_to: Path | None = None) -> dict:
        def rel(p: Path) -> str:
            return str(p.relative_to(relative_to)) if relative_to else str(p)

        return {
            "name": self.name,
            "problems": [rel(p) for p in self.problems],
            "time_budget": self.time_budget,
            "trials": self.trials,
            "seed_base": self.seed_base,
        }


def load_manifest(path: str | Path) -> SuiteManifest:
    """Read a manifest; problem paths are resolved against the manifest's directory."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ProblemParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ProblemParseError(f"{path}: expected an object")
    problems = data.get("problems")
    if not isinstance(problems, list) or not problems or not all(isinstance(p, str) for p in problems):
        raise ProblemParseError(f"{path}: problems: expected a nonempty list of paths")
    trials = data.get("trials", DEFAULT_TRIALS)
    budget = data.get("time_budget", DEFAULT_TIME_BUDGET)
    seed_base = data.get("seed_base", 0)
    if isinstance(trials, bool) or not isinstance(trials, int):
        raise ProblemParseError(f"{path}: trials: expected an integer")
    if isinstance(seed_base, bool) or not isinstance(seed_base, int):
        raise ProblemParseError(f"{path}: seed_base: expected an integer")
    if isinstance(budget, bool) or not isinstance(budget, (int, float)):
        raise ProblemParseError(f"{path}: time_budget: expected a number")
    if trials < 1:
        raise ProblemSemanticError(f"{path}: trials: must be at least 1")
    if not budget > 0:
        raise ProblemSemanticError(f"{path}: time_budget: must be positive")
    resolved = [(path.parent / p) for p in problems]
    missing = [str(p) for p in resolved if not p.is_file()]
    if missing:
        raise FileNotFoundError(f"{path}: missing problem files: {', '.join(missing)}")
    name = data.get("name", path.stem)
    return SuiteManifest(str(name), resolved, float(budget), trials, seed_base)


def write_suite(
    name: str,
    problems: list[ProblemDef],
    out_dir: str | Path,
    time_budget: float = DEFAULT_TIME_BUDGET,
    trials: int = DEFAULT_TRIALS,
    seed_base: int = 0,
) -> Path:
    """Write each problem plus a ``manifest.json`` into ``out_dir``; return the manifest path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = [write_problem(p, out / f"{p.name}.json") for p in problems]
    manifest = SuiteManifest(name, paths, time_budget, trials, seed_base)
    target = out / "manifest.json"
    target.write_text(json.dumps(manifest.to_dict(relative_to=out), indent=2) + "\n")
    return target

