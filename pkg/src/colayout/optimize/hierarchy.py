"""Two-stage rearrangement: optimize inside each functional group, then move groups as rigid bodies."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace
from typing import Callable

import numpy as np

from ..geometry import Pose2
from ..grouping import FunctionalGroups
from ..objective import (
    ObjectiveConfig,
    TaskSet,
    compute_fields,
    evaluate_placed,
    human_terms,
    is_feasible,
    penetration,
    robot_terms,
)
from ..relations import RelationStats
from ..scene import Layout, Scene, apply_layout
from .asa import AsaConfig, SolverResult, asa_minimize
from .cma import CmaConfig, cma_minimize

STRATEGIES = ("asa", "cma", "asa+cma")


@dataclass(frozen=True)
class OptimizeConfig:
    strategy: str = "asa+cma"
    seed: int = 0
    stage1_evals: int = 2000  # per functional group
    stage2_evals: int = 6000
    asa_fraction: float = 0.7
    cma_sigma0: float = 0.3
    cma_polish_sigma0: float = 0.1
    group_margin: float = 1.0
    snap_theta: float | None = None

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}; expected one of {STRATEGIES}")
        if not 0.0 < self.asa_fraction < 1.0:
            raise ValueError("asa_fraction must lie in (0, 1)")

    def to_json(self) -> dict:
        return asdict(self)


def solve(f: Callable, x0, bounds, budget: int, opt: OptimizeConfig, seed: int) -> tuple[SolverResult, list]:
    """Run the configured strategy; returns the best result and per-solver summaries."""
    runs = []
    if opt.strategy == "asa":
        res = asa_minimize(f, x0, bounds, AsaConfig(seed=seed, max_evals=budget))
        runs.append(("asa", res))
    elif opt.strategy == "cma":
        res = cma_minimize(f, x0, CmaConfig(sigma0=opt.cma_sigma0, max_evals=budget, seed=seed), bounds)
        runs.append(("cma", res))
    else:
        asa_budget = max(1, int(round(budget * opt.asa_fraction)))
        first = asa_minimize(f, x0, bounds, AsaConfig(seed=seed, max_evals=asa_budget))
        runs.append(("asa", first))
        rest = budget - first.nfev
        res = first
        if rest > 1:
            polish = cma_minimize(
                f, first.x, CmaConfig(sigma0=opt.cma_polish_sigma0, max_evals=rest, seed=seed + 1), bounds
            )
            runs.append(("cma", polish))
            if polish.fun < first.fun:
                res = polish
    summary = [
        {"solver": name, "nfev": r.nfev, "best_f": r.fun, "curve": [[int(n), float(v)] for n, v in r.trace]}
        for name, r in runs
    ]
    return res, summary


def _place(scene: Scene, poses: dict[str, Pose2]) -> Scene:
    objs = tuple(replace(o, footprint=o.footprint.moved(poses[o.id])) if o.id in poses else o
                 for o in scene.objects)
    return scene.with_objects(objs, validate=False)


def _pose_vector(poses, ids):
    return np.array([v for i in ids for v in (poses[i].x, poses[i].y, poses[i].theta)])


def _decode_poses(x, ids) -> dict[str, Pose2]:
    return {i: Pose2(x[3 * k], x[3 * k + 1], x[3 * k + 2]) for k, i in enumerate(ids)}


def working_region(scene: Scene, ids, margin: float) -> tuple[float, float, float, float]:
    corners = np.vstack([scene[i].footprint.corners() for i in ids])
    lo = np.maximum(corners.min(axis=0) - margin, 0.0)
    hi = np.minimum(corners.max(axis=0) + margin, [scene.room.width, scene.room.height])
    return lo[0], lo[1], hi[0], hi[1]


def _stage1(scene, group, groups, stats, config, opt, seed):
    movable = [i for i in group if scene[i].movable]
    fixed_ids = [o.id for o in scene.objects if not o.movable]
    sub = scene.subscene(set(group) | set(fixed_ids))
    x0_lo, y0_lo, x1, y1 = working_region(scene, movable, opt.group_margin)
    n = len(movable)
    lower = np.tile([x0_lo, y0_lo, -2 * math.pi], n)
    upper = np.tile([x1, y1, 2 * math.pi], n)
    base = {o.id: o.pose for o in scene.objects}

    def f(x):
        placed = _place(sub, _decode_poses(x, movable))
        human = math.fsum(human_terms(placed, groups, stats).values())
        per_object = robot_terms(compute_fields(placed, config.resolution), config.alpha)
        robot = math.fsum(per_object[i] for i in group)
        return human + config.beta * robot + config.collision_penalty * penetration(placed)

    x0 = np.clip(_pose_vector(base, movable), lower, upper)
    res, summary = solve(f, x0, (lower, upper), opt.stage1_evals, opt, seed)
    return _decode_poses(res.x, movable), {"stage": 1, "group": list(group), "best_f": res.fun,
                                          "nfev": sum(s["nfev"] for s in summary), "solvers": summary}


@dataclass
class _Units:
    rigid: list[tuple[tuple[str, ...], np.ndarray]]  # member ids, centroid
    singles: list[str]

    @property
    def size(self) -> int:
        return 3 * (len(self.rigid) + len(self.singles))


def _stage2_units(scene: Scene, groups: FunctionalGroups, poses) -> _Units:
    rigid, singles = [], []
    for g in groups.groups:
        members = [i for i in g if scene[i].movable]
        if len(g) >= 2 and len(members) == len(g):
            c = np.mean([[poses[i].x, poses[i].y] for i in g], axis=0)
            rigid.append((tuple(g), c))
        elif len(g) == 1 and members:
            singles.append(g[0])
    return _Units(rigid, singles)


def _decode_stage2(x, units: _Units, poses) -> dict[str, Pose2]:
    out = dict(poses)
    k = 0
    for members, c in units.rigid:
        dx, dy, dth = x[k:k + 3]
        cs, sn = math.cos(dth), math.sin(dth)
        for i in members:
            p = poses[i]
            rx, ry = p.x - c[0], p.y - c[1]
            out[i] = Pose2(c[0] + cs * rx - sn * ry + dx, c[1] + sn * rx + cs * ry + dy, p.theta + dth)
        k += 3
    for i in units.singles:
        out[i] = Pose2(x[k], x[k + 1], x[k + 2])
        k += 3
    return out


def _stage2_bounds(scene: Scene, units: _Units, poses):
    W, H = scene.room.width, scene.room.height
    lower, upper, x0 = [], [], []
    for _, c in units.rigid:
        lower += [-c[0], -c[1], -math.pi]
        upper += [W - c[0], H - c[1], math.pi]
        x0 += [0.0, 0.0, 0.0]
    for i in units.singles:
        lower += [0.0, 0.0, -2 * math.pi]
        upper += [W, H, 2 * math.pi]
        x0 += [poses[i].x, poses[i].y, poses[i].theta]
    return np.array(lower), np.array(upper), np.array(x0)


def snap_layout(scene: Scene, layout: Layout, step: float) -> Layout:
    return Layout({i: Pose2(p.x, p.y, round(p.theta / step) * step) for i, p in layout.poses.items()})


def optimize_scene(
    scene: Scene,
    groups: FunctionalGroups,
    stats: RelationStats,
    config: ObjectiveConfig = ObjectiveConfig(),
    opt: OptimizeConfig = OptimizeConfig(),
    tasks: TaskSet | None = None,
) -> tuple[Layout, dict]:
    """Rearrange ``scene``; returns the best feasible layout found and a report.

    If no feasible layout is ever evaluated the input layout comes back with
    ``report["success"] = False``.
    """
    input_eval = evaluate_placed(scene, groups, stats, config, tasks)
    input_feasible = is_feasible(scene)
    stages = []

    # stage 1: each multi-object group as an independent sub-scene
    poses = {o.id: o.pose for o in scene.objects}
    for k, g in enumerate(groups.groups):
        if len(g) < 2 or not any(scene[i].movable for i in g):
            continue
        new, summary = _stage1(scene, g, groups, stats, config, opt, opt.seed + 1000 * (k + 1))
        poses.update(new)
        stages.append(summary)
    stage1_poses = dict(poses)

    # stage 2: groups as rigid bodies plus singletons, against the full objective
    units = _stage2_units(scene, groups, stage1_poses)
    best = {"total": input_eval.total if input_feasible else math.inf, "poses": None}

    def evaluate_poses(p):
        placed = _place(scene, p)
        ev = evaluate_placed(placed, groups, stats, config, tasks)
        if ev.penetration == 0.0 and ev.total < best["total"] and is_feasible(placed):
            best["total"], best["poses"] = ev.total, p
        return ev.total

    if units.size:
        lower, upper, x0 = _stage2_bounds(scene, units, stage1_poses)
        x0 = np.clip(x0, lower, upper)
        res, summary = solve(lambda x: evaluate_poses(_decode_stage2(x, units, stage1_poses)),
                             x0, (lower, upper), opt.stage2_evals, opt, opt.seed)
        stages.append({"stage": 2, "units": [list(m) for m, _ in units.rigid] + [[i] for i in units.singles],
                       "best_f": res.fun, "nfev": sum(s["nfev"] for s in summary), "solvers": summary})
    else:
        evaluate_poses(stage1_poses)

    movable = scene.movable_ids
    success = best["poses"] is not None or input_feasible
    if best["poses"] is None:
        layout, source = scene.layout(), "input"
    else:
        layout, source = Layout({i: best["poses"][i] for i in movable}), "optimized"

    snapped = False
    if opt.snap_theta and source == "optimized":
        cand = snap_layout(scene, layout, opt.snap_theta)
        if is_feasible(apply_layout(scene, cand)):
            layout, snapped = cand, True

    final = apply_layout(scene, layout)
    final_eval = evaluate_placed(final, groups, stats, config, tasks)
    report = {
        "strategy": opt.strategy,
        "seed": opt.seed,
        "objective_config": config.to_json(),
        "optimize_config": opt.to_json(),
        "success": success,
        "source": source,
        "theta_snapped": snapped,
        "groups": [list(g) for g in groups.groups],
        "stage1_layout": {i: [p.x, p.y, p.theta] for i, p in stage1_poses.items() if i in movable},
        "stages": stages,
        "input_evaluation": input_eval.to_json(),
        "final_evaluation": final_eval.to_json(),
    }
    return layout, report
