"""Accessibility metrics and before/after comparison reports."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grouping import FunctionalGroups
from .objective import (
    ObjectiveConfig,
    SceneFields,
    TaskSet,
    compute_fields,
    human_terms,
    motion_costs,
    robot_terms,
)
from .relations import RelationStats
from .scene import FORMAT_VERSION, Layout, Scene, apply_layout

INF_TOKEN = "∞"


@dataclass(frozen=True)
class SceneMetrics:
    accessible_area: float
    reachable_ids: frozenset[str]
    robot_term: float
    human_term: float | None = None
    motion_cost: float | None = None

    @property
    def reachable_count(self) -> int:
        return len(self.reachable_ids)

    def to_json(self) -> dict:
        return {
            "accessible_area": self.accessible_area,
            "reachable_ids": sorted(self.reachable_ids),
            "reachable_count": self.reachable_count,
            "robot_term": self.robot_term,
            "human_term": self.human_term,
            "motion_cost": self.motion_cost,
        }


def reachable_from_fields(fields: SceneFields) -> frozenset[str]:
    """Objects with an interactive face inside arm reach of some accessible cell."""
    mask = fields.region.mask
    out = set()
    for obj in fields.scene.objects:
        where = mask & fields.band(obj.id)
        if where.any() and (fields.interaction(obj.id, where) > 0).any():
            out.add(obj.id)
    return frozenset(out)


def reachable_objects(scene: Scene, layout: Layout | None = None, config: ObjectiveConfig = ObjectiveConfig()) -> frozenset[str]:
    placed = scene if layout is None else apply_layout(scene, layout)
    return reachable_from_fields(compute_fields(placed, config.resolution))


def scene_metrics(
    scene: Scene,
    layout: Layout | None = None,
    config: ObjectiveConfig = ObjectiveConfig(),
    groups: FunctionalGroups | None = None,
    stats: RelationStats | None = None,
    tasks: TaskSet | None = None,
) -> SceneMetrics:
    placed = scene if layout is None else apply_layout(scene, layout)
    fields = compute_fields(placed, config.resolution)
    human = None
    if groups is not None and stats is not None:
        human = math.fsum(human_terms(placed, groups, stats).values())
    motion = math.fsum(motion_costs(fields, tasks).values()) if tasks is not None else None
    return SceneMetrics(
        accessible_area=int(fields.region.mask.sum()) * fields.sdf.cell_area,
        reachable_ids=reachable_from_fields(fields),
        robot_term=math.fsum(robot_terms(fields, config.alpha).values()),
        human_term=human,
        motion_cost=motion,
    )


def percent_change(before: float, after: float):
    if before == 0:
        return 0.0 if after == 0 else INF_TOKEN
    return 100.0 * (after - before) / abs(before)


def compare_metrics(before: SceneMetrics, after: SceneMetrics) -> dict:
    delta = {
        "format_version": FORMAT_VERSION,
        "before": before.to_json(),
        "after": after.to_json(),
        "accessible_area_delta": after.accessible_area - before.accessible_area,
        "accessible_area_pct": percent_change(before.accessible_area, after.accessible_area),
        "reachable_delta": after.reachable_count - before.reachable_count,
        "reachable_pct": percent_change(before.reachable_count, after.reachable_count),
        "robot_term_delta": after.robot_term - before.robot_term,
    }
    if before.human_term is not None and after.human_term is not None:
        delta["human_term_delta"] = after.human_term - before.human_term
    if before.motion_cost is not None and after.motion_cost is not None:
        delta["motion_cost_delta"] = after.motion_cost - before.motion_cost
    return delta


def compare(
    scene: Scene,
    layout_before: Layout | None,
    layout_after: Layout | None,
    config: ObjectiveConfig = ObjectiveConfig(),
    groups: FunctionalGroups | None = None,
    stats: RelationStats | None = None,
    tasks: TaskSet | None = None,
) -> dict:
    """Before/after delta report; percentages are relative to the before value."""
    before = scene_metrics(scene, layout_before, config, groups, stats, tasks)
    after = scene_metrics(scene, layout_after, config, groups, stats, tasks)
    return compare_metrics(before, after)


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    return f"{v:+.2f}"


def format_table(delta: dict) -> str:
    b, a = delta["before"], delta["after"]
    rows = [
        ("accessible area [m^2]", b["accessible_area"], a["accessible_area"], delta["accessible_area_pct"]),
        ("reachable objects", b["reachable_count"], a["reachable_count"], delta["reachable_pct"]),
        ("robot term", b["robot_term"], a["robot_term"], None),
    ]
    if "human_term_delta" in delta:
        rows.append(("human term", b["human_term"], a["human_term"], None))
    lines = [f"{'metric':<24}{'before':>12}{'after':>12}{'change %':>12}"]
    for name, vb, va, pct in rows:
        lines.append(f"{name:<24}{vb:>12.3f}{va:>12.3f}{'' if pct is None else _fmt(pct):>12}")
    return "\n".join(lines)


def quartiles(values) -> dict:
    v = np.asarray([x for x in values if not isinstance(x, str)], dtype=float)
    if v.size == 0:
        return {"n": 0}
    q1, med, q3 = np.percentile(v, [25, 50, 75])
    return {"n": int(v.size), "q1": float(q1), "median": float(med), "q3": float(q3)}
