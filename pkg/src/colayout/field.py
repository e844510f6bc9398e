"""Scalar fields sampled at cell centers of a regular grid over the room."""

from __future__ import annotations

import functools
import heapq
import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .geometry import OrientedRect, Room, sd_rect, sd_room_interior
from .scene import Scene, SceneObject

DEFAULT_RESOLUTION = 0.05
_FOUR = ndimage.generate_binary_structure(2, 1)


@dataclass(frozen=True)
class FieldGrid:
    """Values at cell centers ((i + 0.5) * res, (j + 0.5) * res); ``values[i, j]`` is column i, row j."""

    resolution: float
    values: np.ndarray

    @property
    def nx(self) -> int:
        return self.values.shape[0]

    @property
    def ny(self) -> int:
        return self.values.shape[1]

    @property
    def cell_area(self) -> float:
        return self.resolution * self.resolution

    def centers(self) -> np.ndarray:
        return grid_centers(self.nx, self.ny, self.resolution)

    def cell_of(self, point) -> tuple[int, int]:
        i = int(math.floor(point[0] / self.resolution))
        j = int(math.floor(point[1] / self.resolution))
        return min(max(i, 0), self.nx - 1), min(max(j, 0), self.ny - 1)

    def center_of(self, cell) -> np.ndarray:
        return (np.asarray(cell, dtype=float) + 0.5) * self.resolution


@dataclass(frozen=True)
class AccessibleRegion:
    mask: np.ndarray
    seed_cell: tuple[int, int] | None
    resolution: float

    @property
    def area(self) -> float:
        return int(self.mask.sum()) * self.resolution * self.resolution

    @property
    def empty(self) -> bool:
        return self.seed_cell is None


def grid_shape(room: Room, resolution: float) -> tuple[int, int]:
    if not resolution > 0:
        raise ValueError(f"resolution must be positive, got {resolution}")
    # round before ceil so 5.0 / 0.05 does not become 101 cells
    nx = math.ceil(round(room.width / resolution, 9))
    ny = math.ceil(round(room.height / resolution, 9))
    if nx < 3 or ny < 3:
        raise ValueError(f"resolution {resolution} too coarse for a {room.width}x{room.height} room")
    return nx, ny


@functools.lru_cache(maxsize=32)
def grid_centers(nx: int, ny: int, resolution: float) -> np.ndarray:
    xs = (np.arange(nx) + 0.5) * resolution
    ys = (np.arange(ny) + 0.5) * resolution
    pts = np.stack(np.meshgrid(xs, ys, indexing="ij"), axis=-1)
    pts.setflags(write=False)
    return pts


def scene_sdf(scene: Scene, resolution: float = DEFAULT_RESOLUTION) -> FieldGrid:
    """f_B: minimum of every footprint's signed distance and the wall distance."""
    nx, ny = grid_shape(scene.room, resolution)
    pts = grid_centers(nx, ny, resolution)
    values = sd_room_interior(pts, scene.room)
    for obj in scene.objects:
        values = np.minimum(values, sd_rect(pts, obj.footprint))
    return FieldGrid(resolution, values)


def free_space(grid: FieldGrid, r_b: float) -> FieldGrid:
    """f_R = f_B - r_b: clearance of an inflated disc robot."""
    if not r_b > 0:
        raise ValueError(f"r_b must be positive, got {r_b}")
    return FieldGrid(grid.resolution, grid.values - r_b)


def accessible_region(free: FieldGrid, seed_hint=None) -> AccessibleRegion:
    """4-connected component of {f_R > 0} containing the seed cell.

    The seed is the free cell nearest ``seed_hint``; without a hint it is the
    cell of maximal clearance. Ties go to the lowest row-major index.
    """
    positive = free.values > 0.0
    if not positive.any():
        raise ValueError("no free cell: the robot cannot be placed anywhere")
    if seed_hint is not None:
        d2 = np.sum((free.centers() - np.asarray(seed_hint, dtype=float)) ** 2, axis=-1)
        d2 = np.where(positive, d2, np.inf)
        flat = int(np.argmin(d2))
    else:
        flat = int(np.argmax(free.values))
    seed = np.unravel_index(flat, positive.shape)
    labels, _ = ndimage.label(positive, structure=_FOUR)
    mask = labels == labels[seed]
    return AccessibleRegion(mask, (int(seed[0]), int(seed[1])), free.resolution)


def empty_region(grid: FieldGrid) -> AccessibleRegion:
    return AccessibleRegion(np.zeros(grid.values.shape, dtype=bool), None, grid.resolution)


def region_or_empty(free: FieldGrid, seed_hint=None) -> AccessibleRegion:
    if not (free.values > 0.0).any():
        return empty_region(free)
    return accessible_region(free, seed_hint)


# --- interaction -------------------------------------------------------------

def interaction_sign(q, obj: SceneObject) -> np.ndarray:
    """+1 where the footprint face nearest to q is interactive, -1 elsewhere."""
    rect = obj.footprint
    local = rect.pose.to_local(q)
    u, v = local[..., 0], local[..., 1]
    across_x = (np.abs(u) - rect.hx) >= (np.abs(v) - rect.hy)
    sides = obj.interaction_sides
    front_back = np.where(u > 0, "front" in sides, "back" in sides)
    left_right = np.where(v > 0, "left" in sides, "right" in sides)
    return np.where(np.where(across_x, front_back, left_right), 1.0, -1.0)


def outside_distance(q, rect: OrientedRect):
    """f+: distance to the footprint, clamped at zero inside."""
    return np.maximum(sd_rect(q, rect), 0.0)


def interaction_value(q, obj: SceneObject, d_max: float):
    """Pseudo-interaction ramp: sign * max(0, 1 - f+ / d_max)."""
    ramp = np.maximum(0.0, 1.0 - outside_distance(q, obj.footprint) / d_max)
    out = interaction_sign(q, obj) * ramp
    return float(out) if np.ndim(out) == 0 else out


def interaction_field(scene: Scene, object_id: str, grid: FieldGrid) -> FieldGrid:
    obj = scene[object_id]
    return FieldGrid(grid.resolution, interaction_value(grid.centers(), obj, scene.robot.d_max))


# --- path planning -----------------------------------------------------------

_SQRT2 = math.sqrt(2.0)
_MOVES = [(1, 0, False), (-1, 0, False), (0, 1, False), (0, -1, False),
          (1, 1, True), (1, -1, True), (-1, 1, True), (-1, -1, True)]


def grid_neighbors(mask: np.ndarray, cell):
    """8-connected moves; diagonals may not cut a blocked corner."""
    nx, ny = mask.shape
    i, j = cell
    for di, dj, diag in _MOVES:
        a, b = i + di, j + dj
        if not (0 <= a < nx and 0 <= b < ny) or not mask[a, b]:
            continue
        if diag and not (mask[i + di, j] and mask[i, j + dj]):
            continue
        yield (a, b), diag


class PathError(ValueError):
    pass


def astar_cells(mask: np.ndarray, start, goal) -> tuple[int, int] | None:
    """Number of (straight, diagonal) steps on a shortest path, or None if unreachable."""
    start, goal = tuple(start), tuple(goal)
    if start == goal:
        return (0, 0)

    def h(c):
        dx, dy = abs(c[0] - goal[0]), abs(c[1] - goal[1])
        return (_SQRT2 - 1.0) * min(dx, dy) + max(dx, dy)

    g = {start: 0.0}
    steps = {start: (0, 0)}
    heap = [(h(start), 0.0, start)]
    closed = set()
    while heap:
        _, gc, cell = heapq.heappop(heap)
        if cell in closed:
            continue
        if cell == goal:
            return steps[cell]
        closed.add(cell)
        ns, nd = steps[cell]
        for nb, diag in grid_neighbors(mask, cell):
            cand = gc + (_SQRT2 if diag else 1.0)
            if cand < g.get(nb, math.inf):
                g[nb] = cand
                steps[nb] = (ns, nd + 1) if diag else (ns + 1, nd)
                heapq.heappush(heap, (cand + h(nb), cand, nb))
    return None


def steps_length(steps: tuple[int, int], resolution: float) -> float:
    return steps[0] * resolution + steps[1] * resolution * _SQRT2


def shortest_path(region: AccessibleRegion, a, b) -> float:
    """Length in meters of the shortest 8-connected grid path between two points."""
    nx, ny = region.mask.shape
    cells = []
    for p in (a, b):
        i, j = int(math.floor(p[0] / region.resolution)), int(math.floor(p[1] / region.resolution))
        if not (0 <= i < nx and 0 <= j < ny) or not region.mask[i, j]:
            raise PathError(f"point {tuple(p)} is not in the accessible region")
        cells.append((i, j))
    steps = astar_cells(region.mask, *cells)
    if steps is None:
        raise PathError(f"no path between {tuple(a)} and {tuple(b)}")
    return steps_length(steps, region.resolution)


# --- export ------------------------------------------------------------------

def write_pgm(grid: FieldGrid, path, lo: float | None = None, hi: float | None = None) -> None:
    """Dump a field as a 16-bit binary PGM, rows top to bottom (y down)."""
    v = np.asarray(grid.values, dtype=float)
    lo = float(v.min()) if lo is None else lo
    hi = float(v.max()) if hi is None else hi
    scale = 65535.0 / (hi - lo) if hi > lo else 0.0
    img = np.clip(np.rint((v - lo) * scale), 0, 65535).astype(">u2")
    img = img.T[::-1]
    with open(path, "wb") as fh:
        fh.write(f"P5\n{img.shape[1]} {img.shape[0]}\n65535\n".encode("ascii"))
        fh.write(img.tobytes())
