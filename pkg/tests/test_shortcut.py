import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fcit.bench.suites import generate
from fcit.collide import validate_motion, validate_motion_scalar
from fcit.planners import PlannerSettings, path_length, rrt_connect, shortcut


def _valid(problem):
    return lambda a, b: validate_motion(problem.robot, problem.env, a, b)


def test_zero_iterations_is_identity():
    path = [np.array([0.0, 0.0]), np.array([0.5, 0.5]), np.array([1.0, 0.0])]
    out = shortcut(path, lambda a, b: True, np.random.default_rng(0), iterations=0)
    assert [q.tolist() for q in out] == [q.tolist() for q in path]


def test_free_space_collapses_to_straight_line():
    path = [np.array([0.0, 0.0]), np.array([0.3, 0.6]), np.array([0.7, -0.4]), np.array([1.0, 0.0])]
    out = shortcut(path, lambda a, b: True, np.random.default_rng(0), iterations=10)
    assert len(out) == 2
    assert path_length(out) == pytest.approx(1.0)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(0, 60))
def test_never_longer_and_still_valid(seed, iterations):
    problem = generate("wall-gap")[0]
    raw = rrt_connect(problem, PlannerSettings(time_budget=None, max_batches=20, batch_size=100, seed=seed, shortcut_iterations=0))
    if not raw.solved:
        return
    out = shortcut(raw.path, _valid(problem), np.random.default_rng(seed), iterations)
    assert path_length(out) <= path_length(raw.path) + 1e-12
    assert np.array_equal(out[0], raw.path[0]) and np.array_equal(out[-1], raw.path[-1])
    assert all(validate_motion_scalar(problem.robot, problem.env, a, b) for a, b in zip(out, out[1:]))


def test_rrt_connect_output_is_shortcut():
    problem = generate("wall-gap")[0]
    s = PlannerSettings(time_budget=None, max_batches=20, batch_size=100, seed=5)
    raw = rrt_connect(problem, PlannerSettings(**{**s.__dict__, "shortcut_iterations": 0}))
    smooth = rrt_connect(problem, s)
    assert smooth.cost <= raw.cost
