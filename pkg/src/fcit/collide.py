"""Workspace obstacles, robot models, and state/motion validation.

Two validators are provided for states. :func:`validate_state` is the scalar
reference, written with plain floats. :func:`validate_states` evaluates many
configurations at once with numpy and is what blocks, motions, and the
sampler use. They implement the same predicate: a configuration is valid iff
the robot does not penetrate any obstacle (touching the boundary is allowed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .cspace import DEFAULT_BLOCK_WIDTH, distance, interpolate_many
from .errors import ContractViolation

DEFAULT_RESOLUTION = 0.05


@dataclass(frozen=True)
class Sphere:
    center: tuple[float, ...]
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ContractViolation("sphere radius must be positive")


@dataclass(frozen=True)
class Box:
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        if len(self.lower) != len(self.upper) or not all(a < b for a, b in zip(self.lower, self.upper)):
            raise ContractViolation("box requires min < max on every axis")


@dataclass(frozen=True)
class Capsule:
    start: tuple[float, ...]
    end: tuple[float, ...]
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ContractViolation("capsule radius must be positive")
        if len(self.start) != len(self.end):
            raise ContractViolation("capsule endpoints differ in dimension")


Obstacle = Union[Sphere, Box, Capsule]


class Environment:
    """A list of obstacles, also packed into per-type arrays for vectorised checks."""

    def __init__(self, obstacles: Sequence[Obstacle] = (), dim: int | None = None):
        self.obstacles = list(obstacles)
        dims = {len(_anchor(o)) for o in self.obstacles}
        if len(dims) > 1:
            raise ContractViolation(f"obstacles mix workspace dimensions {sorted(dims)}")
        self.dim = dims.pop() if dims else dim
        d = self.dim or 0
        spheres = [o for o in self.obstacles if isinstance(o, Sphere)]
        boxes = [o for o in self.obstacles if isinstance(o, Box)]
        capsules = [o for o in self.obstacles if isinstance(o, Capsule)]
        self.sphere_centers = np.array([s.center for s in spheres], dtype=float).reshape(len(spheres), d)
        self.sphere_radii = np.array([s.radius for s in spheres], dtype=float)
        self.box_lower = np.array([b.lower for b in boxes], dtype=float).reshape(len(boxes), d)
        self.box_upper = np.array([b.upper for b in boxes], dtype=float).reshape(len(boxes), d)
        self.capsule_a = np.array([c.start for c in capsules], dtype=float).reshape(len(capsules), d)
        self.capsule_b = np.array([c.end for c in capsules], dtype=float).reshape(len(capsules), d)
        self.capsule_radii = np.array([c.radius for c in capsules], dtype=float)

    def __len__(self):
        return len(self.obstacles)


def _anchor(o: Obstacle) -> tuple[float, ...]:
    if isinstance(o, Sphere):
        return o.center
    if isinstance(o, Box):
        return o.lower
    return o.start


@dataclass(frozen=True)
class PointRobot:
    dim: int

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ContractViolation("point robots live in 2-D or 3-D workspaces")

    @property
    def config_dim(self) -> int:
        return self.dim

    @property
    def workspace_dim(self) -> int:
        return self.dim


@dataclass(frozen=True)
class PlanarArm:
    link_lengths: tuple[float, ...]
    link_radius: float = 0.0
    base: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not self.link_lengths or not all(l > 0 for l in self.link_lengths):
            raise ContractViolation("arm needs at least one link, all of positive length")
        if self.link_radius < 0:
            raise ContractViolation("link radius must be nonnegative")
        if len(self.base) != 2:
            raise ContractViolation("arm base must be a 2-D point")

    @property
    def config_dim(self) -> int:
        return len(self.link_lengths)

    @property
    def workspace_dim(self) -> int:
        return 2


RobotModel = Union[PointRobot, PlanarArm]


def check_compatible(model: RobotModel, env: Environment) -> None:
    if env.dim is not None and len(env) and env.dim != model.workspace_dim:
        raise ContractViolation(
            f"environment is {env.dim}-D but the robot workspace is {model.workspace_dim}-D"
        )


# ---------------------------------------------------------------------------
# Kinematics
# ---------------------------------------------------------------------------


def forward_kinematics(model: RobotModel, q: Sequence[float]) -> list[tuple[tuple[float, float], tuple[float, float], float]]:
    """Link segments ``(joint_i, joint_i+1, radius)`` of a planar arm."""
    if not isinstance(model, PlanarArm):
        raise ContractViolation("forward kinematics is defined for planar arms only")
    if len(q) != model.config_dim:
        raise ContractViolation(f"arm has {model.config_dim} joints, got {len(q)} values")
    x, y = model.base
    theta = 0.0
    segments = []
    for length, angle in zip(model.link_lengths, q):
        theta += angle
        nx = x + length * math.cos(theta)
        ny = y + length * math.sin(theta)
        segments.append(((x, y), (nx, ny), model.link_radius))
        x, y = nx, ny
    return segments


def forward_kinematics_many(model: PlanarArm, qs: np.ndarray) -> np.ndarray:
    """Joint positions for many configurations, shape (m, k + 1, 2)."""
    theta = np.cumsum(qs, axis=1)
    lengths = np.asarray(model.link_lengths)
    joints = np.empty((qs.shape[0], model.config_dim + 1, 2))
    joints[:, 0, 0] = model.base[0]
    joints[:, 0, 1] = model.base[1]
    # sequential accumulation keeps the rounding identical to the scalar path
    for i in range(model.config_dim):
        joints[:, i + 1, 0] = joints[:, i, 0] + lengths[i] * np.cos(theta[:, i])
        joints[:, i + 1, 1] = joints[:, i, 1] + lengths[i] * np.sin(theta[:, i])
    return joints


# ---------------------------------------------------------------------------
# Scalar geometry
# ---------------------------------------------------------------------------


def _dot(u, v) -> float:
    return sum(a * b for a, b in zip(u, v))


def _point_segment_dist2(p, a, b) -> float:
    ab = [y - x for x, y in zip(a, b)]
    ap = [y - x for x, y in zip(a, p)]
    denom = _dot(ab, ab)
    t = 0.0 if denom == 0.0 else min(1.0, max(0.0, _dot(ap, ab) / denom))
    r = [x + t * u - y for x, u, y in zip(a, ab, p)]
    return _dot(r, r)


def _point_box_dist2(p, lo, hi) -> float:
    s = 0.0
    for x, l, h in zip(p, lo, hi):
        e = max(l - x, 0.0, x - h)
        s += e * e
    return s


def _orient(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _on_segment(a, b, p) -> bool:
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])


def _segments_intersect(a, b, c, d) -> bool:
    o1, o2, o3, o4 = _orient(a, b, c), _orient(a, b, d), _orient(c, d, a), _orient(c, d, b)
    if ((o1 > 0 and o2 < 0) or (o1 < 0 and o2 > 0)) and ((o3 > 0 and o4 < 0) or (o3 < 0 and o4 > 0)):
        return True
    return (
        (o1 == 0 and _on_segment(a, b, c))
        or (o2 == 0 and _on_segment(a, b, d))
        or (o3 == 0 and _on_segment(c, d, a))
        or (o4 == 0 and _on_segment(c, d, b))
    )


def _segment_segment_dist2(a, b, c, d) -> float:
    if _segments_intersect(a, b, c, d):
        return 0.0
    return min(
        _point_segment_dist2(a, c, d),
        _point_segment_dist2(b, c, d),
        _point_segment_dist2(c, a, b),
        _point_segment_dist2(d, a, b),
    )


def _segment_hits_open_box(a, b, lo, hi) -> bool:
    t0, t1 = 0.0, 1.0
    for x0, x1, l, h in zip(a, b, lo, hi):
        dx = x1 - x0
        if dx == 0.0:
            if not l < x0 < h:
                return False
            continue
        ta, tb = (l - x0) / dx, (h - x0) / dx
        if ta > tb:
            ta, tb = tb, ta
        t0 = max(t0, ta)
        t1 = min(t1, tb)
    return t0 < t1


def _segment_box_dist2(a, b, lo, hi) -> float:
    """Squared distance between a 2-D segment and a closed box, given no interior hit."""
    corners = [(lo[0], lo[1]), (lo[0], hi[1]), (hi[0], lo[1]), (hi[0], hi[1])]
    best = min(_point_box_dist2(a, lo, hi), _point_box_dist2(b, lo, hi))
    for c in corners:
        best = min(best, _point_segment_dist2(c, a, b))
    return best


def _point_valid(env: Environment, q) -> bool:
    for o in env.obstacles:
        if isinstance(o, Sphere):
            if _dot([x - c for x, c in zip(q, o.center)], [x - c for x, c in zip(q, o.center)]) < o.radius * o.radius:
                return False
        elif isinstance(o, Box):
            if all(l < x < h for x, l, h in zip(q, o.lower, o.upper)):
                return False
        elif _point_segment_dist2(q, o.start, o.end) < o.radius * o.radius:
            return False
    return True


def _link_hits(env: Environment, a, b, rho: float) -> bool:
    for o in env.obstacles:
        if isinstance(o, Sphere):
            r = o.radius + rho
            if _point_segment_dist2(o.center, a, b) < r * r:
                return True
        elif isinstance(o, Box):
            if _segment_hits_open_box(a, b, o.lower, o.upper):
                return True
            if rho > 0 and _segment_box_dist2(a, b, o.lower, o.upper) < rho * rho:
                return True
        else:
            r = o.radius + rho
            if _segment_segment_dist2(a, b, o.start, o.end) < r * r:
                return True
    return False


def validate_state(model: RobotModel, env: Environment, q: Sequence[float]) -> bool:
    """Scalar reference validity check for one configuration."""
    q = [float(v) for v in q]
    if len(q) != model.config_dim:
        raise ContractViolation(f"config has dimension {len(q)}, robot expects {model.config_dim}")
    if isinstance(model, PointRobot):
        return _point_valid(env, q)
    segments = forward_kinematics(model, q)
    rho = model.link_radius
    for a, b, _ in segments:
        if _link_hits(env, a, b, rho):
            return False
    for i in range(len(segments)):
        for j in range(i + 2, len(segments)):
            a, b, _ = segments[i]
            c, d, _ = segments[j]
            if _segments_intersect(a, b, c, d):
                return False
            if rho > 0 and _segment_segment_dist2(a, b, c, d) < (2 * rho) ** 2:
                return False
    return True


# ---------------------------------------------------------------------------
# Vectorised geometry. Array shapes broadcast; the trailing axis holds coordinates.
# ---------------------------------------------------------------------------


def _vdot(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    out = u[..., 0] * v[..., 0]
    for i in range(1, u.shape[-1]):
        out = out + u[..., i] * v[..., i]
    return out


def _v_point_segment_dist2(p, a, b) -> np.ndarray:
    ab = b - a
    ap = p - a
    denom = _vdot(ab, ab)
    num = _vdot(ap, ab)
    safe = np.where(denom == 0.0, 1.0, denom)
    t = np.where(denom == 0.0, 0.0, np.minimum(1.0, np.maximum(0.0, num / safe)))
    r = a + t[..., None] * ab - p
    return _vdot(r, r)


def _v_point_box_dist2(p, lo, hi) -> np.ndarray:
    e = np.maximum(np.maximum(lo - p, 0.0), p - hi)
    return _vdot(e, e)


def _v_orient(a, b, c) -> np.ndarray:
    return (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) - (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0])


def _v_on_segment(a, b, p) -> np.ndarray:
    return (
        (np.minimum(a[..., 0], b[..., 0]) <= p[..., 0])
        & (p[..., 0] <= np.maximum(a[..., 0], b[..., 0]))
        & (np.minimum(a[..., 1], b[..., 1]) <= p[..., 1])
        & (p[..., 1] <= np.maximum(a[..., 1], b[..., 1]))
    )


def _v_segments_intersect(a, b, c, d) -> np.ndarray:
    o1, o2, o3, o4 = _v_orient(a, b, c), _v_orient(a, b, d), _v_orient(c, d, a), _v_orient(c, d, b)
    proper = (((o1 > 0) & (o2 < 0)) | ((o1 < 0) & (o2 > 0))) & (((o3 > 0) & (o4 < 0)) | ((o3 < 0) & (o4 > 0)))
    touching = (
        ((o1 == 0) & _v_on_segment(a, b, c))
        | ((o2 == 0) & _v_on_segment(a, b, d))
        | ((o3 == 0) & _v_on_segment(c, d, a))
        | ((o4 == 0) & _v_on_segment(c, d, b))
    )
    return proper | touching


def _v_segment_segment_dist2(a, b, c, d) -> np.ndarray:
    dist = np.minimum(
        np.minimum(_v_point_segment_dist2(a, c, d), _v_point_segment_dist2(b, c, d)),
        np.minimum(_v_point_segment_dist2(c, a, b), _v_point_segment_dist2(d, a, b)),
    )
    return np.where(_v_segments_intersect(a, b, c, d), 0.0, dist)


def _v_segment_hits_open_box(a, b, lo, hi) -> np.ndarray:
    a, b, lo, hi = np.broadcast_arrays(a, b, lo, hi)
    t0 = np.zeros(a.shape[:-1])
    t1 = np.ones(a.shape[:-1])
    miss = np.zeros(a.shape[:-1], dtype=bool)
    with np.errstate(divide="ignore", invalid="ignore"):
        for i in range(a.shape[-1]):
            x0, dx = a[..., i], b[..., i] - a[..., i]
            flat = dx == 0.0
            miss |= flat & ~((lo[..., i] < x0) & (x0 < hi[..., i]))
            safe = np.where(flat, 1.0, dx)
            ta = (lo[..., i] - x0) / safe
            tb = (hi[..., i] - x0) / safe
            t0 = np.where(flat, t0, np.maximum(t0, np.minimum(ta, tb)))
            t1 = np.where(flat, t1, np.minimum(t1, np.maximum(ta, tb)))
    return ~miss & (t0 < t1)


def _v_segment_box_dist2(a, b, lo, hi) -> np.ndarray:
    best = np.minimum(_v_point_box_dist2(a, lo, hi), _v_point_box_dist2(b, lo, hi))
    for cx, cy in ((lo[..., 0], lo[..., 1]), (lo[..., 0], hi[..., 1]), (hi[..., 0], lo[..., 1]), (hi[..., 0], hi[..., 1])):
        corner = np.stack([cx, cy], axis=-1)
        best = np.minimum(best, _v_point_segment_dist2(corner, a, b))
    return best


def _points_valid(env: Environment, qs: np.ndarray) -> np.ndarray:
    hit = None
    if len(env.sphere_radii):
        diff = qs[:, None, :] - env.sphere_centers[None, :, :]
        hit = (_vdot(diff, diff) < env.sphere_radii**2).any(axis=1)
    if len(env.box_lower):
        q = qs[:, None, :]
        inside = ((env.box_lower < q) & (q < env.box_upper)).all(axis=2).any(axis=1)
        hit = inside if hit is None else hit | inside
    if len(env.capsule_radii):
        d2 = _v_point_segment_dist2(qs[:, None, :], env.capsule_a[None], env.capsule_b[None])
        near = (d2 < env.capsule_radii**2).any(axis=1)
        hit = near if hit is None else hit | near
    return np.ones(len(qs), dtype=bool) if hit is None else ~hit


def _arms_valid(model: PlanarArm, env: Environment, qs: np.ndarray) -> np.ndarray:
    joints = forward_kinematics_many(model, qs)
    a = joints[:, :-1, :]  # (m, k, 2)
    b = joints[:, 1:, :]
    rho = model.link_radius
    hit = np.zeros(len(qs), dtype=bool)
    A, B = a[:, :, None, :], b[:, :, None, :]
    if len(env.sphere_radii):
        r = env.sphere_radii + rho
        d2 = _v_point_segment_dist2(env.sphere_centers[None, None], A, B)
        hit |= np.any(d2 < r * r, axis=(1, 2))
    if len(env.box_lower):
        lo, hi = env.box_lower[None, None], env.box_upper[None, None]
        box_hit = _v_segment_hits_open_box(A, B, lo, hi)
        if rho > 0:
            box_hit |= _v_segment_box_dist2(A, B, lo, hi) < rho * rho
        hit |= np.any(box_hit, axis=(1, 2))
    if len(env.capsule_radii):
        r = env.capsule_radii + rho
        d2 = _v_segment_segment_dist2(A, B, env.capsule_a[None, None], env.capsule_b[None, None])
        hit |= np.any(d2 < r * r, axis=(1, 2))
    k = model.config_dim
    pairs = [(i, j) for i in range(k) for j in range(i + 2, k)]
    if pairs:
        ii = np.array([p[0] for p in pairs])
        jj = np.array([p[1] for p in pairs])
        self_hit = _v_segments_intersect(a[:, ii], b[:, ii], a[:, jj], b[:, jj])
        if rho > 0:
            self_hit |= _v_segment_segment_dist2(a[:, ii], b[:, ii], a[:, jj], b[:, jj]) < (2 * rho) ** 2
        hit |= np.any(self_hit, axis=1)
    return ~hit


def validate_states(model: RobotModel, env: Environment, qs: np.ndarray) -> np.ndarray:
    """Validity mask for the rows of ``qs`` (m, d); agrees with :func:`validate_state` row-wise."""
    qs = np.asarray(qs, dtype=np.float64)
    if qs.ndim != 2 or qs.shape[1] != model.config_dim:
        raise ContractViolation(f"expected (m, {model.config_dim}) configurations, got {qs.shape}")
    if type(model) is PointRobot:
        return _points_valid(env, qs)
    return _arms_valid(model, env, qs)


# ---------------------------------------------------------------------------
# Blocks and motions
# ---------------------------------------------------------------------------


@dataclass
class ValidationBlock:
    """``width`` lanes of configurations in structure-of-arrays layout, ``lanes[axis, lane]``."""

    lanes: np.ndarray
    occupancy: int

    def __post_init__(self):
        width = self.lanes.shape[1]
        if width & (width - 1):
            raise ContractViolation("block width must be a power of two")
        if not 0 <= self.occupancy <= width:
            raise ContractViolation("occupancy exceeds block width")

    @property
    def width(self) -> int:
        return self.lanes.shape[1]

    @classmethod
    def from_configs(cls, configs: np.ndarray, width: int = DEFAULT_BLOCK_WIDTH) -> "ValidationBlock":
        configs = np.asarray(configs, dtype=np.float64)
        if len(configs) > width:
            raise ContractViolation(f"{len(configs)} configs do not fit in {width} lanes")
        lanes = np.zeros((configs.shape[1], width))
        lanes[:, : len(configs)] = configs.T
        return cls(lanes, len(configs))


def validate_states_block(model: RobotModel, env: Environment, block: ValidationBlock) -> int:
    """Bit ``i`` of the result is set iff lane ``i`` holds a valid configuration.

    Lanes at or beyond the block's occupancy are ignored and their bits are 0.
    """
    ok = validate_states(model, env, block.lanes[:, : block.occupancy].T)
    mask = 0
    for i in np.flatnonzero(ok):
        mask |= 1 << int(i)
    return mask


def discretization_count(length: float, resolution: float) -> int:
    """Number of states checked along a motion, endpoints included.

    The segment count is ``max(2, ceil(length / resolution))`` rounded up to a
    power of two, so halving the resolution always yields a superset of the
    previous parameters.
    """
    if not resolution > 0:
        raise ContractViolation("resolution must be positive")
    segments = max(2, math.ceil(length / resolution))
    return (1 << (segments - 1).bit_length()) + 1


_RAKE_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def rake_order(m: int) -> np.ndarray:
    """Visiting order of ``m`` interpolation indices: endpoints, then bit-reversed midpoints."""
    return _rake(m)[0]


def _rake(m: int) -> tuple[np.ndarray, np.ndarray]:
    cached = _RAKE_CACHE.get(m)
    if cached is None:
        segments = m - 1
        bits = max(1, (segments - 1).bit_length())
        rev = [int(format(i, f"0{bits}b")[::-1], 2) for i in range(1 << bits)]
        inner = [j for j in rev if 0 < j < segments]
        order = np.array([0, segments] + inner, dtype=np.int64)
        cached = (order, order / segments)
        _RAKE_CACHE[m] = cached
    return cached


def _canonical(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # interpolate from a fixed end so (a, b) and (b, a) test bit-identical states
    return (b, a) if b.tolist() < a.tolist() else (a, b)


def motion_parameters(a: np.ndarray, b: np.ndarray, resolution: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Canonical endpoints and the parameters ``t_j = j / (m - 1)`` of a motion."""
    a, b = _canonical(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    m = discretization_count(distance(a, b), resolution)
    return a, b, np.arange(m) / (m - 1)


@dataclass
class MotionStats:
    motions: int = 0
    states: int = 0


def validate_motion(
    model: RobotModel,
    env: Environment,
    a: np.ndarray,
    b: np.ndarray,
    resolution: float = DEFAULT_RESOLUTION,
    width: int = DEFAULT_BLOCK_WIDTH,
    stats: MotionStats | None = None,
) -> bool:
    """Check the straight motion ``a -> b`` at the given resolution, in blocks of ``width`` lanes."""
    if len(a) != len(b):
        raise ContractViolation(f"dimension mismatch: {len(a)} vs {len(b)}")
    a, b = _canonical(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    m = discretization_count(distance(a, b), resolution)
    ts = _rake(m)[1]
    delta = b - a
    if stats is not None:
        stats.motions += 1
    for start in range(0, m, width):
        states = a + ts[start : start + width, None] * delta
        if start == 0:
            # rake order visits t = 0 then t = 1; a + 1*(b - a) need not equal b exactly
            states[1] = b
        if stats is not None:
            stats.states += len(states)
        if not validate_states(model, env, states).all():
            return False
    return True


def validate_motion_scalar(model: RobotModel, env: Environment, a, b, resolution: float = DEFAULT_RESOLUTION) -> bool:
    """Sequential reference for :func:`validate_motion` using the scalar state check."""
    a, b, ts = motion_parameters(a, b, resolution)
    return all(validate_state(model, env, interpolate_many(a, b, np.array([t]))[0]) for t in ts)


@dataclass
class Validator:
    """Bundles a robot, its environment, and motion-checking settings."""

    model: RobotModel
    env: Environment
    resolution: float = DEFAULT_RESOLUTION
    width: int = DEFAULT_BLOCK_WIDTH
    stats: MotionStats = field(default_factory=MotionStats)

    def state(self, q) -> bool:
        return validate_state(self.model, self.env, q)

    def states(self, qs: np.ndarray) -> np.ndarray:
        return validate_states(self.model, self.env, qs)

    def motion(self, a, b) -> bool:
        return validate_motion(self.model, self.env, a, b, self.resolution, self.width, self.stats)
