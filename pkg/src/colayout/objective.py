"""Layout objective: human term, robot term, motion cost and collision penalty."""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .field import (
    DEFAULT_RESOLUTION,
    AccessibleRegion,
    FieldGrid,
    astar_cells,
    free_space,
    grid_centers,
    grid_shape,
    interaction_sign,
    region_or_empty,
    steps_length,
)
from .geometry import rect_penetration, rect_separation, room_protrusion, sd_rect_grid, sd_room_interior
from .grouping import FunctionalGroups
from .relations import RelationStats, center_distance
from .scene import Layout, Scene, SceneError, apply_layout, check_format_version, FORMAT_VERSION

NEUTRAL_HUMAN = 0.5


@dataclass(frozen=True)
class ObjectiveConfig:
    alpha: float = 0.1
    beta: float = 1.0
    gamma: float = 0.0
    collision_penalty: float = 10.0
    resolution: float = DEFAULT_RESOLUTION

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0 or self.gamma < 0:
            raise ValueError("alpha, beta and gamma must be non-negative")
        if not self.collision_penalty > 0:
            raise ValueError("collision_penalty must be positive")
        if not self.resolution > 0:
            raise ValueError("resolution must be positive")

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data: Mapping) -> "ObjectiveConfig":
        check_format_version(data, "config")
        try:
            known = {k: float(v) for k, v in data.items() if k in cls.__dataclass_fields__}
            return cls(**known)
        except (TypeError, ValueError) as exc:
            raise SceneError(f"config: {exc}") from exc


Waypoint = str | tuple[float, float]


@dataclass(frozen=True)
class TaskSet:
    tasks: tuple[tuple[str, tuple[Waypoint, ...]], ...]

    def validate(self, scene: Scene) -> None:
        ids = set(scene.ids)
        for name, wps in self.tasks:
            for wp in wps:
                if isinstance(wp, str) and wp not in ids:
                    raise SceneError(f"task {name!r}: unknown object id {wp!r}")

    @classmethod
    def from_json(cls, data: Mapping) -> "TaskSet":
        check_format_version(data, "task set")
        tasks = []
        try:
            for t in data["tasks"]:
                wps = tuple(w if isinstance(w, str) else (float(w[0]), float(w[1])) for w in t["waypoints"])
                tasks.append((str(t["name"]), wps))
        except (KeyError, TypeError, IndexError, ValueError) as exc:
            raise SceneError(f"task set: {exc}") from exc
        return cls(tuple(tasks))

    def to_json(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "tasks": [
                {"name": n, "waypoints": [w if isinstance(w, str) else list(w) for w in wps]}
                for n, wps in self.tasks
            ],
        }


@dataclass
class SceneFields:
    """Every grid quantity the objective and metrics need, computed once per layout."""

    scene: Scene
    sdf: FieldGrid
    free: FieldGrid
    region: AccessibleRegion
    object_sd: dict[str, np.ndarray]

    @property
    def resolution(self) -> float:
        return self.sdf.resolution

    def band(self, object_id: str) -> np.ndarray:
        """Cells within arm reach of the footprint (0 <= f+ < d_max)."""
        return self.object_sd[object_id] < self.scene.robot.d_max

    def interaction(self, object_id: str, where: np.ndarray | None = None) -> np.ndarray:
        """f_I on the whole grid, or only at the cells selected by ``where``."""
        obj = self.scene[object_id]
        d_max = self.scene.robot.d_max
        pts = self.sdf.centers()
        fplus = np.maximum(self.object_sd[object_id], 0.0)
        if where is None:
            return interaction_sign(pts, obj) * np.maximum(0.0, 1.0 - fplus / d_max)
        return interaction_sign(pts[where], obj) * np.maximum(0.0, 1.0 - fplus[where] / d_max)


def compute_fields(scene: Scene, resolution: float = DEFAULT_RESOLUTION) -> SceneFields:
    nx, ny = grid_shape(scene.room, resolution)
    pts = grid_centers(nx, ny, resolution)
    xs, ys = pts[:, 0, 0], pts[0, :, 1]
    values = sd_room_interior(pts, scene.room)
    object_sd = {}
    for obj in scene.objects:
        d = sd_rect_grid(xs, ys, obj.footprint)
        object_sd[obj.id] = d
        values = np.minimum(values, d)
    sdf = FieldGrid(resolution, values)
    free = free_space(sdf, scene.robot.r_b)
    region = region_or_empty(free, scene.robot.seed_hint)
    return SceneFields(scene, sdf, free, region, object_sd)


def _placed(scene: Scene, layout: Layout | None) -> Scene:
    return scene if layout is None else apply_layout(scene, layout)


# --- terms -------------------------------------------------------------------

def edge_human_cost(stats: RelationStats, label_a: str, label_b: str, d: float) -> float:
    hist = stats.hist(label_a, label_b)
    if hist is None or hist.total == 0:
        return NEUTRAL_HUMAN
    return 1.0 - hist.density(d) / hist.sup()


def human_terms(scene: Scene, groups: FunctionalGroups, stats: RelationStats) -> dict[tuple[str, str], float]:
    ids = set(scene.ids)
    out = {}
    for a, b in groups.kept_edges:
        if a in ids and b in ids:
            oa, ob = scene[a], scene[b]
            out[(a, b)] = edge_human_cost(stats, oa.label, ob.label, center_distance(oa, ob))
    return out


def human_term(scene: Scene, layout: Layout | None, groups: FunctionalGroups, stats: RelationStats) -> float:
    """Sum over kept edges of 1 - P_d(d) / sup P_d; unseen label pairs cost 0.5."""
    return math.fsum(human_terms(_placed(scene, layout), groups, stats).values())


def robot_terms(fields: SceneFields, alpha: float) -> dict[str, float]:
    """I_i = -sum over (band_i and R) of (f_I + alpha * f_R) * cell area, per object."""
    out = {}
    mask = fields.region.mask
    for obj in fields.scene.objects:
        where = mask & fields.band(obj.id)
        if not where.any():
            out[obj.id] = 0.0
            continue
        integrand = fields.interaction(obj.id, where) + alpha * fields.free.values[where]
        out[obj.id] = -float(integrand.sum()) * fields.sdf.cell_area
    return out


def robot_term(scene: Scene, layout: Layout | None, config: ObjectiveConfig) -> tuple[float, dict[str, float]]:
    fields = compute_fields(_placed(scene, layout), config.resolution)
    per_object = robot_terms(fields, config.alpha)
    return math.fsum(per_object.values()), per_object


def waypoint_cell(fields: SceneFields, wp: Waypoint):
    """Grid cell used for a waypoint, or None when it cannot be reached."""
    mask = fields.region.mask
    if isinstance(wp, str):
        near = mask & fields.band(wp)
        if not near.any():
            return None
        facing = near & (fields.interaction(wp) > 0)
        if facing.any():
            near = facing
        d = np.where(near, fields.object_sd[wp], np.inf)
        return np.unravel_index(int(np.argmin(d)), d.shape)
    i, j = fields.sdf.cell_of(wp)
    x, y = wp
    inside = 0 <= x < fields.sdf.nx * fields.resolution and 0 <= y < fields.sdf.ny * fields.resolution
    return (i, j) if inside and mask[i, j] else None


def unreachable_penalty(scene: Scene) -> float:
    return 4.0 * 2.0 * (scene.room.width + scene.room.height)


def motion_costs(fields: SceneFields, tasks: TaskSet) -> dict[str, float]:
    penalty = unreachable_penalty(fields.scene)
    out = {}
    for name, wps in tasks.tasks:
        cells = [waypoint_cell(fields, wp) for wp in wps]
        total = 0.0
        for a, b in zip(cells, cells[1:]):
            steps = None if a is None or b is None else astar_cells(fields.region.mask, a, b)
            total += penalty if steps is None else steps_length(steps, fields.resolution)
        out[name] = total
    return out


def motion_cost(scene: Scene, layout: Layout | None, tasks: TaskSet,
                resolution: float = DEFAULT_RESOLUTION) -> float:
    """Total grid path length over every task's consecutive waypoints."""
    placed = _placed(scene, layout)
    tasks.validate(placed)
    return math.fsum(motion_costs(compute_fields(placed, resolution), tasks).values())


def _circumradius(obj) -> float:
    return math.hypot(obj.footprint.hx, obj.footprint.hy)


def penetration(scene: Scene) -> float:
    """Total overlap depth between object pairs plus wall protrusion."""
    total = 0.0
    for a, b in itertools.combinations(scene.objects, 2):
        if center_distance(a, b) > _circumradius(a) + _circumradius(b):
            continue
        total += rect_penetration(a.footprint, b.footprint)
    for o in scene.objects:
        total += room_protrusion(o.footprint, scene.room)
    return total


def min_separation(scene: Scene) -> float:
    seps = [rect_separation(a.footprint, b.footprint) for a, b in itertools.combinations(scene.objects, 2)]
    return min(seps) if seps else math.inf


def is_feasible(scene: Scene) -> bool:
    """Every object pair strictly separated and every footprint inside the room."""
    return min_separation(scene) > 0.0 and scene.footprints_inside_room()


@dataclass(frozen=True)
class Evaluation:
    human: float
    robot: float
    motion: float
    penetration: float
    total: float
    per_object: Mapping[str, float] = field(default_factory=dict)
    per_edge: Mapping[tuple[str, str], float] = field(default_factory=dict)
    accessible: bool = True

    def to_json(self) -> dict:
        return {
            "human": self.human,
            "robot": self.robot,
            "motion": self.motion,
            "penetration": self.penetration,
            "total": self.total,
            "per_object": dict(sorted(self.per_object.items())),
            "per_edge": [[a, b, v] for (a, b), v in self.per_edge.items()],
            "accessible": self.accessible,
        }


def evaluate_placed(
    scene: Scene,
    groups: FunctionalGroups,
    stats: RelationStats,
    config: ObjectiveConfig,
    tasks: TaskSet | None = None,
) -> Evaluation:
    per_edge = human_terms(scene, groups, stats)
    human = math.fsum(per_edge.values())
    fields = compute_fields(scene, config.resolution)
    per_object = robot_terms(fields, config.alpha)
    robot = math.fsum(per_object.values())
    motion = 0.0
    if tasks is not None:
        motion = math.fsum(motion_costs(fields, tasks).values())
    pen = penetration(scene)
    total = human + config.beta * robot + config.gamma * motion + config.collision_penalty * pen
    return Evaluation(human, robot, motion, pen, total, per_object, per_edge, not fields.region.empty)


def evaluate(
    scene: Scene,
    layout: Layout | None,
    groups: FunctionalGroups,
    stats: RelationStats,
    config: ObjectiveConfig,
    tasks: TaskSet | None = None,
) -> Evaluation:
    """Objective value of ``layout`` applied to ``scene`` (``None`` keeps current poses)."""
    return evaluate_placed(_placed(scene, layout), groups, stats, config, tasks)
