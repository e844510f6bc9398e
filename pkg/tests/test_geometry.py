import math

import numpy as np
import pytest
import shapely
from hypothesis import given, settings
from hypothesis import strategies as st
from shapely.geometry import Point
from scipy.spatial import cKDTree

from colayout.geometry import (
    OrientedRect,
    Pose2,
    Room,
    rect_separation,
    room_protrusion,
    sd_rect,
    sd_rect_grid,
    sd_room_interior,
    wrap_angle,
)

from conftest import boundary_points, random_rect, rect, shapely_poly

finite = st.floats(-10, 10, allow_nan=False)
angle = st.floats(-math.pi, math.pi, allow_nan=False)
half = st.floats(0.05, 2.0, allow_nan=False)


def test_wrap_angle_range():
    for t in [0.0, math.pi, -math.pi, 3 * math.pi, -7.5, 100.0]:
        w = wrap_angle(t)
        assert -math.pi <= w < math.pi
        assert math.isclose(math.cos(w), math.cos(t), abs_tol=1e-9)
        assert math.isclose(math.sin(w), math.sin(t), abs_tol=1e-9)
    assert wrap_angle(1.25) == 1.25


def test_pose_round_trip():
    p = Pose2(1.0, -2.0, 0.7)
    q = np.array([[0.3, 0.4], [5.0, -1.0]])
    np.testing.assert_allclose(p.to_world(p.to_local(q)), q, atol=1e-12)


def test_rect_rejects_bad_extents():
    with pytest.raises(ValueError):
        OrientedRect(Pose2(0, 0), 0.0, 1.0)
    with pytest.raises(ValueError):
        Pose2(float("nan"), 0.0)


def test_sd_rect_hand_values():
    r = rect(0, 0, 0, 1, 1)
    assert sd_rect((0, 0), r) == -1.0
    for c in r.corners():
        assert abs(sd_rect(c, r)) < 1e-15
    assert sd_rect((3, 0), r) == 2.0
    assert math.isclose(sd_rect((2, 2), r), math.sqrt(2))


def test_sd_rect_vectorized_matches_scalar():
    rng = np.random.default_rng(1)
    r = random_rect(rng)
    q = rng.uniform(-4, 4, (50, 2))
    many = sd_rect(q, r)
    assert many.shape == (50,)
    for p, v in zip(q, many):
        assert sd_rect(p, r) == v


def test_sd_rect_grid_matches_pointwise():
    rng = np.random.default_rng(2)
    xs, ys = np.linspace(-3, 3, 31), np.linspace(-2, 2, 17)
    pts = np.stack(np.meshgrid(xs, ys, indexing="ij"), axis=-1)
    for _ in range(10):
        r = random_rect(rng)
        np.testing.assert_allclose(sd_rect_grid(xs, ys, r), sd_rect(pts, r), atol=1e-12)


def test_sd_rect_boundary_sampling_oracle():
    rng = np.random.default_rng(3)
    for _ in range(100):
        r = random_rect(rng)
        q = rng.uniform(-4, 4, 2)
        oracle = cKDTree(boundary_points(r, 100_000)).query(q)[0]
        inside = shapely_poly(r).contains(Point(q))
        got = sd_rect(q, r)
        assert abs(abs(got) - oracle) < 1e-3
        assert (got < 0) == inside


def test_room_interior_values():
    room = Room(10, 10)
    assert sd_room_interior((5, 5), room) == 5.0
    assert sd_room_interior((0, 5), room) == 0.0
    assert sd_room_interior((-1, 5), room) == -1.0
    assert sd_room_interior((12, 13), room) == -math.hypot(2, 3)


def test_separation_hand_values():
    a, b = rect(0, 0, 0, 0.5, 0.5), rect(3, 0, 0, 0.5, 0.5)
    assert rect_separation(a, b) == pytest.approx(2.0)
    assert rect_separation(a, a) < 0
    c = rect(0.9, 0, 0, 0.5, 0.5)
    assert rect_separation(a, c) == pytest.approx(-0.1)


def test_separation_matches_polygon_oracle():
    rng = np.random.default_rng(4)
    for _ in range(500):
        a, b = random_rect(rng, -2, 2), random_rect(rng, -2, 2)
        sep = rect_separation(a, b)
        pa, pb = shapely_poly(a), shapely_poly(b)
        assert (sep > 0) == (not pa.intersects(pb))
        if sep > 0:
            assert sep == pytest.approx(pa.distance(pb), abs=1e-9)
            sampled = shapely.distance(shapely.points(boundary_points(a, 20_000)), pb).min()
            assert abs(sep - sampled) < 1e-3


def test_room_protrusion():
    room = Room(4, 3)
    assert room_protrusion(rect(2, 1.5, 0, 0.5, 0.5), room) == 0.0
    assert room_protrusion(rect(0.3, 1.5, 0, 0.5, 0.5), room) == pytest.approx(0.2)


@settings(max_examples=200, deadline=None)
@given(finite, finite, finite, finite, angle, half, half, finite, finite, angle)
def test_sd_rect_rigid_equivariance(qx, qy, rx, ry, rt, hx, hy, tx, ty, ang):
    r = rect(rx, ry, rt, hx, hy)
    T = Pose2(tx, ty, ang)
    q2 = T.to_world(np.array([qx, qy]))
    c2 = T.to_world(np.array([rx, ry]))
    r2 = rect(c2[0], c2[1], rt + ang, hx, hy)
    assert sd_rect(q2, r2) == pytest.approx(sd_rect((qx, qy), r), abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(finite, finite, angle, half, half, finite, finite, angle, half, half)
def test_separation_symmetric(ax, ay, at, ahx, ahy, bx, by, bt, bhx, bhy):
    a, b = rect(ax, ay, at, ahx, ahy), rect(bx, by, bt, bhx, bhy)
    assert rect_separation(a, b) == rect_separation(b, a)
