import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stresskit.affine import (
    AffineSubspace,
    Tolerances,
    canonical_sign,
    contains,
    flats_equal,
    join,
    meet,
    meet_all,
    normal_directions,
    orthonormality_residual,
    span_of_points,
    unit_normal_within,
)
from stresskit.errors import DegenerateDirectionError, UsageError

coords = st.floats(-5, 5, allow_nan=False, allow_infinity=False)


def vec(D):
    return st.lists(coords, min_size=D, max_size=D).map(np.array)


def test_tolerances_reject_nonpositive():
    with pytest.raises(UsageError):
        Tolerances(eps_rank=0.0)
    with pytest.raises(UsageError):
        Tolerances(eps_rank=1e-20)


def test_span_of_points_dims():
    assert span_of_points([[0, 0, 0]]).dim == 0
    assert span_of_points([[0, 0, 0], [1, 0, 0], [2, 0, 0]]).dim == 1
    assert span_of_points([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]]).dim == 2


def test_meet_of_coordinate_planes_is_axis():
    xy = span_of_points([[0, 0, 0], [1, 0, 0], [0, 1, 0]])
    xz = span_of_points([[0, 0, 0], [1, 0, 0], [0, 0, 1]])
    m = meet(xy, xz)
    assert m.dim == 1
    assert flats_equal(m, span_of_points([[0, 0, 0], [1, 0, 0]]))


def test_parallel_planes_meet_empty():
    a = span_of_points([[0, 0, 0], [1, 0, 0], [0, 1, 0]])
    b = span_of_points([[0, 0, 1], [1, 0, 1], [0, 1, 1]])
    assert meet(a, b).is_empty


def test_join_of_skew_lines_is_whole_space():
    a = span_of_points([[0, 0, 0], [1, 0, 0]])
    b = span_of_points([[0, 0, 1], [0, 1, 1]])
    assert join(a, b).dim == 3


def test_unit_normal_within_points_toward_reference():
    face = span_of_points([[0, 0, 0], [1, 0, 0], [0, 1, 0]])
    edge = span_of_points([[0, 0, 0], [1, 0, 0]])
    n = unit_normal_within(face, edge, [0.3, 2.0, 0.0])
    assert np.allclose(n, [0, 1, 0])
    with pytest.raises(DegenerateDirectionError):
        unit_normal_within(face, edge, [5.0, 0.0, 0.0])


def test_canonical_sign():
    assert np.allclose(canonical_sign([0, -2, 1]), [0, 2, -1])
    assert np.allclose(canonical_sign([0, 0, 0]), [0, 0, 0])


@settings(max_examples=60, deadline=None)
@given(vec(3), vec(3), vec(3), vec(3), vec(3), vec(3))
def test_meet_of_two_planes_lies_in_both(p0, p1, p2, q0, q1, q2):
    a = span_of_points([p0, p1, p2])
    b = span_of_points([q0, q1, q2])
    if a.dim != 2 or b.dim != 2 or flats_equal(a, b):
        return
    m = meet(a, b)
    if m.is_empty:
        # only parallel planes are disjoint
        assert np.linalg.matrix_rank(np.vstack([a.basis, b.basis]), tol=1e-6) == 2
        return
    assert m.dim == 1
    assert contains(a, m, Tolerances(eps_geom=1e-6)) and contains(b, m, Tolerances(eps_geom=1e-6))


@settings(max_examples=60, deadline=None)
@given(st.lists(vec(4), min_size=1, max_size=4))
def test_span_is_orthonormal_and_contains_points(points):
    s = span_of_points(points)
    assert orthonormality_residual(s.basis) < 1e-10
    for p in points:
        assert s.distance_to(p) < 1e-7 * (1 + np.abs(p).max())


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 31 - 1))
def test_normal_direction_is_unit_and_orthogonal(seed):
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(3, 3))
    face = span_of_points(pts)
    edge = span_of_points(pts[:2])
    n = normal_directions(face, edge)
    assert abs(np.linalg.norm(n) - 1) < 1e-12
    assert np.linalg.norm(edge.direction_projector() @ n) < 1e-10
    assert np.linalg.norm(face.complement_projector() @ n) < 1e-10


def test_meet_all_of_three_generic_planes_is_point():
    rng = np.random.default_rng(3)
    planes = [span_of_points(rng.normal(size=(3, 3))) for _ in range(3)]
    assert meet_all(planes).dim == 0


def test_ambient_mismatch():
    with pytest.raises(UsageError):
        meet(AffineSubspace.point([0, 0]), AffineSubspace.point([0, 0, 0]))
