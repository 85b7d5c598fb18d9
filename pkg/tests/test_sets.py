import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ccrm.exceptions import DimensionError, InvalidSetError, ProjectionError
from ccrm.sets import (AffineSubspace, Ball, Box, Ellipsoid, FeasibilityProblem, Halfspace,
                       Sublevel, evaluate_constraint, membership, project, reflect,
                       set_from_dict)
from oracles import ellipsoid_bisection, random_spd

coords = st.floats(-50, 50, allow_nan=False)
vec2 = arrays(np.float64, 2, elements=coords)


def test_halfspace_projection():
    assert np.array_equal(project(Halfspace([1, 0], 0), [2, 3]), [0, 3])


def test_unit_ball_as_ellipsoid():
    e = Ellipsoid(np.eye(2), [0, 0], 1.0)
    np.testing.assert_allclose(e.project([2, 0]), [1, 0], atol=1e-14)


def test_ellipsoid_matches_bisection_oracle():
    A = np.diag([1.0, 4.0])
    x = Ellipsoid(A, [0, 0], 1.0).project([2, 2])
    np.testing.assert_allclose(x, ellipsoid_bisection(A, [0, 0], 1.0, [2, 2]), atol=1e-8)


def test_ellipsoid_random_against_oracle(rng):
    for _ in range(30):
        n = int(rng.integers(2, 8))
        A = random_spd(rng, n)
        b = rng.standard_normal(n)
        c = float(b @ np.linalg.solve(A, b)) + rng.uniform(0.5, 3)
        z = rng.uniform(-10, 10, n)
        np.testing.assert_allclose(Ellipsoid(A, b, c).project(z),
                                   ellipsoid_bisection(A, b, c, z), atol=1e-8)


def test_ellipsoid_inside_returns_input():
    e = Ellipsoid(np.eye(3), np.zeros(3), 4.0)
    z = np.array([0.1, 0.2, 0.3])
    assert np.array_equal(e.project(z), z)


def test_ellipsoid_errors():
    with pytest.raises(InvalidSetError):
        Ellipsoid([[1, 0], [0, -1]], [0, 0], 1)
    with pytest.raises(InvalidSetError):
        Ellipsoid([[1, 2], [0, 1]], [0, 0], 1)
    with pytest.raises(DimensionError):
        Ellipsoid(np.eye(2), [0, 0], 1).project([1, 2, 3])


def test_projection_failure_carries_residual():
    e = Ellipsoid(np.diag([1.0, 1e-6]), [0, 0], 1.0)
    e._tol = 0.0  # unattainable tolerance
    with pytest.raises(ProjectionError) as info:
        e.project([1e3, 1e3])
    assert info.value.residual is not None


def test_reflect_examples():
    assert np.array_equal(reflect(Halfspace([1, 0], 0), [2, 0]), [-2, 0])
    assert np.array_equal(reflect(Ball([0, 0], 1), [3, 0]), [-1, 0])
    z = np.array([0.2, 0.1])
    assert np.array_equal(reflect(Ball([0, 0], 1), z), z)


def test_reflect_is_exact_formula(rng):
    s = Ellipsoid(random_spd(rng, 4), rng.standard_normal(4), 5.0)
    z = rng.uniform(-5, 5, 4)
    assert np.array_equal(s.reflect(z), 2.0 * s.project(z) - z)


def test_membership_examples():
    ball = Ellipsoid(np.eye(2), [0, 0], 1.0)
    assert membership(ball, [0, 0], 0)
    assert not membership(ball, [2, 0], 0)
    assert membership(Halfspace([1, 0], 1), [1 + 1e-12, 0], 1e-10)
    with pytest.raises(ValueError):
        membership(ball, [0, 0], -1)


def test_constraint_examples():
    assert evaluate_constraint(Ellipsoid(np.eye(2), [0, 0], 1), [2, 0]) == 3
    assert evaluate_constraint(Halfspace([1, 0], 2), [5, 0]) == 3
    assert evaluate_constraint(Ellipsoid(np.diag([2.0, 1.0]), [1, 0], 4), [1, 1]) == 1
    with pytest.raises(InvalidSetError):
        evaluate_constraint(AffineSubspace([0, 0], [[1, 0]]), [1, 1])


def test_box_and_ball_closed_forms():
    b = Box([0, 0], [1, 2])
    assert np.array_equal(b.project([3, -1]), [1, 0])
    assert b.constraint([3, -1]) == 2
    np.testing.assert_allclose(Ball([1, 1], 2).project([1, 5]), [1, 3])


def test_affine_from_equations_and_involution(rng):
    s = AffineSubspace.from_equations([[1, 1, 1]], [3])
    z = rng.standard_normal(3)
    np.testing.assert_allclose(s.project(z).sum(), 3)
    np.testing.assert_allclose(s.reflect(s.reflect(z)), z, atol=1e-10)
    with pytest.raises(InvalidSetError):
        AffineSubspace.from_equations([[1, 0], [1, 0]], [0, 1])


def test_sublevel_with_and_without_projector():
    f = lambda x: float(x @ x) - 1.0
    g = lambda x: 2 * x
    np.testing.assert_allclose(Sublevel(f, g, 2).project([3.0, 4.0]), [0.6, 0.8], atol=1e-6)
    fast = Sublevel(f, g, 2, projector=lambda z: z / np.linalg.norm(z))
    np.testing.assert_allclose(fast.project([3.0, 4.0]), [0.6, 0.8])


def test_serialization_roundtrip(rng):
    sets = [Halfspace([1, 2], 3), Ball([0, 1], 2), Box([-1, -1], [1, 1]),
            AffineSubspace([0, 1], [[1, 1]]), Ellipsoid(random_spd(rng, 2), [0.1, 0.2], 2)]
    z = np.array([3.0, -2.0])
    for s in sets:
        t = set_from_dict(s.to_dict())
        np.testing.assert_allclose(t.project(z), s.project(z), atol=1e-12)
    with pytest.raises(InvalidSetError):
        set_from_dict({"kind": "cone"})


def test_problem_validation():
    with pytest.raises(DimensionError):
        FeasibilityProblem([Ball([0, 0], 1), Ball([0, 0, 0], 1)])
    with pytest.raises(InvalidSetError):
        FeasibilityProblem([Ball([0, 0], 1)], certified_point=[3, 0])
    p = FeasibilityProblem([Ball([0, 0], 1), Halfspace([1, 0], 0)], certified_point=[0, 0])
    q = FeasibilityProblem.from_dict(p.to_dict())
    assert q.m == 2 and q.dimension == 2


ELL = Ellipsoid(np.array([[3.0, 1.0], [1.0, 2.0]]), [0.5, -0.2], 4.0)
SETS = [Halfspace([1, -2], 1), Ball([1, 1], 2), Box([-1, 0], [2, 3]), ELL,
        AffineSubspace([0, 1], [[2, 1]])]


@settings(max_examples=60, deadline=None)
@given(x=vec2, y=vec2, i=st.integers(0, len(SETS) - 1))
def test_nonexpansive_and_idempotent(x, y, i):
    s = SETS[i]
    px, py = s.project(x), s.project(y)
    assert np.linalg.norm(px - py) <= np.linalg.norm(x - y) + 1e-10
    np.testing.assert_allclose(s.project(px), px, atol=1e-12 * (1 + np.abs(px).max()))
    assert membership(s, px, 1e-9)


@settings(max_examples=60, deadline=None)
@given(z=vec2, y=vec2, i=st.integers(0, len(SETS) - 1))
def test_pythagoras_and_obtuse_angle(z, y, i):
    s = SETS[i]
    member = s.project(y)
    p = s.project(z)
    lhs = np.sum((p - z) ** 2) + np.sum((p - member) ** 2)
    assert lhs <= np.sum((z - member) ** 2) + 1e-8 * (1 + np.sum((z - member) ** 2))
    scale = 1 + np.linalg.norm(z - p) * np.linalg.norm(member - p)
    assert (z - p) @ (member - p) <= 1e-10 * scale
