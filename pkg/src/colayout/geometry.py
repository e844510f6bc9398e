"""Planar primitives: poses, oriented rectangles and exact signed distances."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def wrap_angle(theta: float) -> float:
    """Map an angle to [-pi, pi)."""
    if -math.pi <= theta < math.pi:
        return theta
    wrapped = math.fmod(theta + math.pi, 2.0 * math.pi)
    if wrapped < 0.0:
        wrapped += 2.0 * math.pi
    out = wrapped - math.pi
    # fmod rounding can land exactly on +pi
    return -math.pi if out >= math.pi else out


@dataclass(frozen=True)
class Pose2:
    x: float
    y: float
    theta: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.theta)):
            raise ValueError(f"non-finite pose {self.x, self.y, self.theta}")
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "theta", wrap_angle(float(self.theta)))

    @property
    def xy(self) -> np.ndarray:
        return np.array([self.x, self.y])

    def rotation(self) -> np.ndarray:
        c, s = math.cos(self.theta), math.sin(self.theta)
        return np.array([[c, -s], [s, c]])

    def to_local(self, points) -> np.ndarray:
        """Express world points (..., 2) in this pose's frame."""
        p = np.asarray(points, dtype=float) - self.xy
        c, s = math.cos(self.theta), math.sin(self.theta)
        u = c * p[..., 0] + s * p[..., 1]
        v = -s * p[..., 0] + c * p[..., 1]
        return np.stack([u, v], axis=-1)

    def to_world(self, points) -> np.ndarray:
        p = np.asarray(points, dtype=float)
        c, s = math.cos(self.theta), math.sin(self.theta)
        x = c * p[..., 0] - s * p[..., 1] + self.x
        y = s * p[..., 0] + c * p[..., 1] + self.y
        return np.stack([x, y], axis=-1)


@dataclass(frozen=True)
class OrientedRect:
    """Rectangle footprint; local +x is the object's front, +y its left."""

    pose: Pose2
    hx: float
    hy: float

    def __post_init__(self):
        if not (self.hx > 0 and self.hy > 0 and math.isfinite(self.hx) and math.isfinite(self.hy)):
            raise ValueError(f"half extents must be positive and finite, got {(self.hx, self.hy)}")
        object.__setattr__(self, "hx", float(self.hx))
        object.__setattr__(self, "hy", float(self.hy))

    @property
    def half_extents(self) -> tuple[float, float]:
        return (self.hx, self.hy)

    def moved(self, pose: Pose2) -> "OrientedRect":
        return OrientedRect(pose, self.hx, self.hy)

    def corners(self) -> np.ndarray:
        """Corners in counter-clockwise order, shape (4, 2)."""
        local = np.array(
            [[self.hx, self.hy], [-self.hx, self.hy], [-self.hx, -self.hy], [self.hx, -self.hy]]
        )
        return self.pose.to_world(local)

    def axes(self) -> np.ndarray:
        """Unit face normals of the local x and y axes, shape (2, 2)."""
        c, s = math.cos(self.pose.theta), math.sin(self.pose.theta)
        return np.array([[c, s], [-s, c]])


@dataclass(frozen=True)
class Room:
    """Axis-aligned room [0, width] x [0, height]."""

    width: float
    height: float

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ValueError(f"room dimensions must be positive, got {(self.width, self.height)}")
        object.__setattr__(self, "width", float(self.width))
        object.__setattr__(self, "height", float(self.height))

    def contains(self, point) -> bool:
        x, y = point
        return 0.0 <= x <= self.width and 0.0 <= y <= self.height


def sd_rect(q, rect: OrientedRect):
    """Exact signed distance from point(s) ``q`` to the rectangle boundary.

    Negative inside, zero on the boundary, positive outside. ``q`` may be a
    single point or any array of shape (..., 2); a float is returned for a
    single point.
    """
    local = rect.pose.to_local(q)
    dx = np.abs(local[..., 0]) - rect.hx
    dy = np.abs(local[..., 1]) - rect.hy
    outside = np.hypot(np.maximum(dx, 0.0), np.maximum(dy, 0.0))
    inside = np.minimum(np.maximum(dx, dy), 0.0)
    d = outside + inside
    return float(d) if d.ndim == 0 else d


def sd_rect_grid(xs: np.ndarray, ys: np.ndarray, rect: OrientedRect) -> np.ndarray:
    """``sd_rect`` on the tensor grid xs x ys, shape (len(xs), len(ys)); same arithmetic, less memory traffic."""
    c, s = math.cos(rect.pose.theta), math.sin(rect.pose.theta)
    px = (xs - rect.pose.x)[:, None]
    py = (ys - rect.pose.y)[None, :]
    dx = np.abs(c * px + s * py) - rect.hx
    dy = np.abs(-s * px + c * py) - rect.hy
    outside = np.hypot(np.maximum(dx, 0.0), np.maximum(dy, 0.0))
    return outside + np.minimum(np.maximum(dx, dy), 0.0)


def sd_room_interior(q, room: Room):
    """Signed distance to the room walls: positive inside, negative outside."""
    p = np.asarray(q, dtype=float)
    x, y = p[..., 0], p[..., 1]
    # interior: distance to the nearest wall; exterior: distance to the box
    dx = np.maximum(-x, x - room.width)
    dy = np.maximum(-y, y - room.height)
    outside = np.hypot(np.maximum(dx, 0.0), np.maximum(dy, 0.0))
    inside = np.minimum(np.maximum(dx, dy), 0.0)
    d = -(outside + inside)
    return float(d) if d.ndim == 0 else d


def _point_segment_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ab = b - a
    t = np.clip(np.sum((p - a) * ab, axis=-1) / np.dot(ab, ab), 0.0, 1.0)
    closest = a + t[..., None] * ab
    return np.hypot(*(p - closest).T)


def _boundary_distance(ca: np.ndarray, cb: np.ndarray) -> float:
    """Minimum distance between the boundaries of two disjoint convex polygons."""
    best = math.inf
    for src, dst in ((ca, cb), (cb, ca)):
        for k in range(4):
            d = _point_segment_distance(src, dst[k], dst[(k + 1) % 4])
            best = min(best, float(d.min()))
    return best


def _min_axis_overlap(ca: np.ndarray, cb: np.ndarray, axes: np.ndarray) -> float:
    pa = ca @ axes.T
    pb = cb @ axes.T
    overlap = np.minimum(pa.max(axis=0), pb.max(axis=0)) - np.maximum(pa.min(axis=0), pb.min(axis=0))
    return float(overlap.min())


def rect_penetration(a: OrientedRect, b: OrientedRect) -> float:
    """max(0, -rect_separation(a, b)) without computing the boundary distance."""
    return max(0.0, _min_axis_overlap(a.corners(), b.corners(), np.vstack([a.axes(), b.axes()])))


def rect_separation(a: OrientedRect, b: OrientedRect) -> float:
    """Boundary distance between disjoint rectangles, or minus the penetration depth.

    Penetration depth is the minimum translation distance over the four
    separating-axis candidates.
    """
    ca, cb = a.corners(), b.corners()
    min_overlap = _min_axis_overlap(ca, cb, np.vstack([a.axes(), b.axes()]))
    if min_overlap <= 0.0:
        return _boundary_distance(ca, cb)
    return -min_overlap


def room_protrusion(rect: OrientedRect, room: Room) -> float:
    """Total depth by which a footprint sticks out through the walls (0 if inside)."""
    c = rect.corners()
    return float(
        max(0.0, -c[:, 0].min())
        + max(0.0, c[:, 0].max() - room.width)
        + max(0.0, -c[:, 1].min())
        + max(0.0, c[:, 1].max() - room.height)
    )
