"""Problem files: JSON documents describing bounds, robot, obstacles, start and goals.

Example::

    {
      "name": "wall-gap",
      "dimension": 2,
      "bounds": {"lower": [0, 0], "upper": [1, 1]},
      "robot": {"kind": "point"},
      "obstacles": [{"type": "box", "lower": [0.45, -1], "upper": [0.55, 0.8]}],
      "start": [0.1, 0.5],
      "goals": [[0.9, 0.5]]
    }

Arm robots use ``{"kind": "arm", "link_lengths": [...], "link_radius": r, "base": [x, y]}``.
Spheres take ``center``/``radius``, boxes ``lower``/``upper``, capsules ``start``/``end``/``radius``.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

from ..collide import Box, Capsule, Environment, PlanarArm, PointRobot, Sphere
from ..cspace import Bounds
from ..errors import ContractViolation, ProblemParseError, ProblemSemanticError
from ..planners.problem import ProblemDef


class _Fields:
    """Typed access to a JSON object, with errors naming the offending field."""

    def __init__(self, data: Any, where: str):
        if not isinstance(data, dict):
            raise ProblemParseError(f"{where or 'document'}: expected an object")
        self.data = data
        self.where = where

    def _path(self, key: str) -> str:
        return f"{self.where}.{key}" if self.where else key

    def _get(self, key: str, default: Any):
        if key not in self.data:
            if default is _REQUIRED:
                raise ProblemParseError(f"{self._path(key)}: missing required field")
            return default
        return self.data[key]

    def number(self, key: str, default: Any = None) -> float:
        value = self._get(key, _REQUIRED if default is None else default)
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise ProblemParseError(f"{self._path(key)}: expected a finite number")
        return float(value)

    def integer(self, key: str) -> int:
        value = self._get(key, _REQUIRED)
        if isinstance(value, bool) or not isinstance(value, int):
            raise ProblemParseError(f"{self._path(key)}: expected an integer")
        return value

    def string(self, key: str, default: Any = None) -> str:
        value = self._get(key, _REQUIRED if default is None else default)
        if not isinstance(value, str):
            raise ProblemParseError(f"{self._path(key)}: expected a string")
        return value

    def vector(self, key: str, default: Any = None) -> tuple[float, ...]:
        return _vector(self._get(key, _REQUIRED if default is None else default), self._path(key))

    def vectors(self, key: str) -> list[tuple[float, ...]]:
        value = self._get(key, _REQUIRED)
        if not isinstance(value, list):
            raise ProblemParseError(f"{self._path(key)}: expected a list of arrays")
        return [_vector(v, f"{self._path(key)}[{i}]") for i, v in enumerate(value)]

    def obj(self, key: str) -> "_Fields":
        return _Fields(self._get(key, _REQUIRED), self._path(key))

    def objects(self, key: str) -> list["_Fields"]:
        value = self._get(key, [])
        if not isinstance(value, list):
            raise ProblemParseError(f"{self._path(key)}: expected a list")
        return [_Fields(v, f"{self._path(key)}[{i}]") for i, v in enumerate(value)]


_REQUIRED = object()


def _vector(value: Any, where: str) -> tuple[float, ...]:
    if not isinstance(value, list) or not value:
        raise ProblemParseError(f"{where}: expected a nonempty array of numbers")
    for i, x in enumerate(value):
        if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
            raise ProblemParseError(f"{where}[{i}]: expected a finite number")
    return tuple(float(x) for x in value)


def _semantic(where: str, exc: Exception) -> ProblemSemanticError:
    return ProblemSemanticError(f"{where}: {exc}")


def _robot(f: _Fields, dim: int):
    kind = f.string("kind")
    if kind == "point":
        if dim not in (2, 3):
            raise ProblemSemanticError(f"robot: point robots need dimension 2 or 3, file declares {dim}")
        return PointRobot(dim)
    if kind == "arm":
        links = f.vector("link_lengths")
        if len(links) != dim:
            raise ProblemSemanticError(
                f"dimension mismatch: robot.link_lengths has {len(links)} links but dimension is {dim}"
            )
        try:
            return PlanarArm(links, f.number("link_radius", 0.0), f.vector("base", [0.0, 0.0]))
        except ContractViolation as exc:
            raise _semantic(f.where, exc) from None
    raise ProblemParseError(f"{f._path('kind')}: unknown robot kind {kind!r} (expected 'point' or 'arm')")


def _obstacle(f: _Fields, workspace_dim: int):
    kind = f.string("type")
    try:
        if kind == "sphere":
            ob, anchor = Sphere(f.vector("center"), f.number("radius")), "center"
        elif kind == "box":
            ob, anchor = Box(f.vector("lower"), f.vector("upper")), "lower"
        elif kind == "capsule":
            ob, anchor = Capsule(f.vector("start"), f.vector("end"), f.number("radius")), "start"
        else:
            raise ProblemParseError(f"{f._path('type')}: unknown obstacle type {kind!r}")
    except ContractViolation as exc:
        raise _semantic(f.where, exc) from None
    n = len(getattr(ob, anchor))
    if n != workspace_dim:
        raise ProblemSemanticError(f"dimension mismatch: {f.where} is {n}-D but the robot workspace is {workspace_dim}-D")
    return ob


def problem_from_dict(data: Any) -> ProblemDef:
    top = _Fields(data, "")
    name = top.string("name", "problem")
    dim = top.integer("dimension")
    if dim < 1:
        raise ProblemSemanticError("dimension: must be positive")
    b = top.obj("bounds")
    lower, upper = b.vector("lower"), b.vector("upper")
    if len(lower) != dim or len(upper) != dim:
        raise ProblemSemanticError(
            f"dimension mismatch: bounds have {len(lower)}/{len(upper)} entries but dimension is {dim}"
        )
    try:
        bounds = Bounds(lower, upper)
    except ContractViolation as exc:
        raise _semantic("bounds", exc) from None
    robot = _robot(top.obj("robot"), dim)
    obstacles = [_obstacle(o, robot.workspace_dim) for o in top.objects("obstacles")]
    start = top.vector("start")
    goals = top.vectors("goals")
    return ProblemDef(bounds, robot, Environment(obstacles, dim=robot.workspace_dim), start, goals, name=name)


def load_problem(path: str | Path) -> ProblemDef:
    """Read and validate a problem file.

    Raises :class:`ProblemParseError` for malformed JSON or fields (with a
    line/column or field path) and :class:`ProblemSemanticError` for
    well-formed files describing an impossible problem. ``OSError`` from
    reading propagates unchanged.
    """
    path = Path(path)
    text = path.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    try:
        return problem_from_dict(data)
    except ProblemParseError as exc:
        raise ProblemParseError(f"{path}: {exc}") from None
    except ProblemSemanticError as exc:
        raise ProblemSemanticError(f"{path}: {exc}") from None


def _obstacle_dict(o) -> dict:
    if isinstance(o, Sphere):
        return {"type": "sphere", "center": list(o.center), "radius": o.radius}
    if isinstance(o, Box):
        return {"type": "box", "lower": list(o.lower), "upper": list(o.upper)}
    return {"type": "capsule", "start": list(o.start), "end": list(o.end), "radius": o.radius}


def problem_to_dict(problem: ProblemDef) -> dict:
    robot = problem.robot
    if isinstance(robot, PointRobot):
        robot_d = {"kind": "point"}
    else:
        robot_d = {
            "kind": "arm",
            "link_lengths": list(robot.link_lengths),
            "link_radius": robot.link_radius,
            "base": list(robot.base),
        }
    return {
        "name": problem.name,
        "dimension": problem.dim,
        "bounds": {"lower": problem.bounds.lower.tolist(), "upper": problem.bounds.upper.tolist()},
        "robot": robot_d,
        "obstacles": [_obstacle_dict(o) for o in problem.env.obstacles],
        "start": problem.start.tolist(),
        "goals": [g.tolist() for g in problem.goals],
    }


def write_problem(problem: ProblemDef, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(problem_to_dict(problem), indent=2) + "\n")
    return path
