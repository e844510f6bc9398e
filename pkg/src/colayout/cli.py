"""Command-line interface: ``colayout analyze | optimize | stats-build | compare | render``."""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from importlib import resources
from pathlib import Path

from . import __version__
from .field import write_pgm
from .grouping import extract_groups
from .metrics import compare_metrics, format_table, quartiles, scene_metrics
from .objective import ObjectiveConfig, TaskSet, evaluate
from .optimize import OptimizeConfig, optimize_scene
from .relations import DEFAULT_BIN_WIDTH, RelationStats, SemanticTable, build_graph, stats_build
from .render import RenderStyle, render_svg
from .scene import (
    FORMAT_VERSION,
    Layout,
    SceneError,
    apply_layout,
    load_scene,
    read_json,
    save_scene,
    scene_from_json,
    write_json,
)

EXIT_USAGE, EXIT_INVALID, EXIT_INFEASIBLE = 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def bundled(name: str) -> Path:
    return Path(str(resources.files("colayout") / "data" / name))


def _angle(text: str) -> float:
    m = re.fullmatch(r"\s*([0-9.]+)\s*(deg|rad)?\s*", text)
    if not m:
        raise argparse.ArgumentTypeError(f"invalid angle {text!r}; use e.g. 90deg or 1.5708rad")
    value = float(m.group(1))
    return math.radians(value) if m.group(2) in (None, "deg") else value


def _load_config(args) -> ObjectiveConfig:
    data = read_json(args.config) if args.config else {}
    if args.resolution is not None:
        data = {**data, "resolution": args.resolution}
    return ObjectiveConfig.from_json(data)


def _load_relations(args):
    semantic = SemanticTable.from_json(read_json(args.semantic or bundled("semantic.json")))
    stats = RelationStats.from_json(read_json(args.stats or bundled("stats.json")))
    return semantic, stats


def _groups(scene, args):
    semantic, stats = _load_relations(args)
    graph = build_graph(scene, semantic, stats)
    return extract_groups(graph, K=args.k, seed=args.seed if args.seed is not None else 0), stats


def _tasks(args):
    return TaskSet.from_json(read_json(args.tasks)) if getattr(args, "tasks", None) else None


def _load_pair(path, base):
    """A scene file, or a layout file applied to ``base``."""
    data = read_json(path)
    if "objects" in data:
        return scene_from_json(data)
    if base is None:
        raise SceneError(f"{path}: layout files need --scene")
    return apply_layout(base, Layout.from_json(data))


def cmd_analyze(args) -> int:
    scene = load_scene(args.scene)
    config = _load_config(args)
    groups, stats = _groups(scene, args)
    tasks = _tasks(args)
    metrics = scene_metrics(scene, None, config, groups, stats, tasks)
    ev = evaluate(scene, None, groups, stats, config, tasks)
    out = {
        "format_version": FORMAT_VERSION,
        "groups": [list(g) for g in groups.groups],
        "kept_edges": [[a, b, w] for (a, b), w in groups.kept_edges.items()],
        "metrics": metrics.to_json(),
        "evaluation": ev.to_json(),
    }
    if args.field:
        from .objective import compute_fields

        write_pgm(compute_fields(scene, config.resolution).free, args.field)
    print(json.dumps(out, indent=2))
    return 0


def cmd_optimize(args) -> int:
    scene = load_scene(args.scene)
    config = _load_config(args)
    groups, stats = _groups(scene, args)
    tasks = _tasks(args)
    opt = OptimizeConfig(
        strategy=args.strategy,
        seed=args.seed,
        stage1_evals=args.stage1_evals,
        stage2_evals=args.stage2_evals,
        snap_theta=args.snap_theta,
    )
    layout, report = optimize_scene(scene, groups, stats, config, opt, tasks)
    before = scene_metrics(scene, None, config, groups, stats, tasks)
    after = scene_metrics(scene, layout, config, groups, stats, tasks)
    report = {"format_version": FORMAT_VERSION, **report, "metrics": compare_metrics(before, after)}
    if args.out:
        write_json(layout.to_json(), args.out)
    if args.out_scene:
        save_scene(apply_layout(scene, layout), args.out_scene)
    if args.report:
        write_json(report, args.report)
    print(format_table(report["metrics"]))
    if not report["success"]:
        print("no collision-free layout found; input layout returned", file=sys.stderr)
        return EXIT_INFEASIBLE
    return 0


def cmd_stats_build(args) -> int:
    corpus_dir = Path(args.corpus)
    if not corpus_dir.is_dir():
        raise SceneError(f"{corpus_dir}: not a directory")
    files = sorted(corpus_dir.glob("*.json"))
    if not files:
        raise SceneError(f"{corpus_dir}: no scene files")
    stats = stats_build((load_scene(f) for f in files), args.bin_width)
    write_json(stats.to_json(), args.out)
    print(f"{len(files)} scenes, {len(stats.cooccur)} label pairs -> {args.out}")
    return 0


def _compare_scenes(before, after, args):
    config = _load_config(args)
    groups, stats = _groups(before, args)
    tasks = _tasks(args)
    return compare_metrics(
        scene_metrics(before, None, config, groups, stats, tasks),
        scene_metrics(after, None, config, groups, stats, tasks),
    )


def cmd_compare(args) -> int:
    base = load_scene(args.scene) if args.scene else None
    if args.pairs_dir:
        rows = []
        for b in sorted(Path(args.pairs_dir).glob("*_before.json")):
            a = b.with_name(b.name.replace("_before.json", "_after.json"))
            if a.exists():
                rows.append((b.stem[: -len("_before")], _compare_scenes(_load_pair(b, base), _load_pair(a, base), args)))
        out = {
            "format_version": FORMAT_VERSION,
            "pairs": {name: d for name, d in rows},
            "accessible_area_pct": quartiles(d["accessible_area_pct"] for _, d in rows),
            "reachable_pct": quartiles(d["reachable_pct"] for _, d in rows),
            "robot_term_delta": quartiles(d["robot_term_delta"] for _, d in rows),
        }
        text = json.dumps({k: v for k, v in out.items() if k != "pairs"}, indent=2)
    else:
        if not (args.before and args.after):
            raise SceneError("compare needs BEFORE and AFTER files, or --pairs-dir")
        out = _compare_scenes(_load_pair(args.before, base), _load_pair(args.after, base), args)
        text = format_table(out)
    if args.out:
        write_json(out, args.out)
    print(text)
    return 0


def cmd_render(args) -> int:
    scene = load_scene(args.scene)
    layout = Layout.from_json(read_json(args.layout)) if args.layout else None
    config = _load_config(args)
    placed = scene if layout is None else apply_layout(scene, layout)
    groups = _groups(scene, args)[0] if len(scene.objects) >= 2 else None
    svg = render_svg(placed, None, groups, config, RenderStyle(scale=args.scale))
    if args.out:
        Path(args.out).write_text(svg)
    else:
        sys.stdout.write(svg)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--resolution", type=float, default=None, help="grid resolution in meters (default 0.05)")
    common.add_argument("--seed", type=int, default=None, help="random seed")
    common.add_argument("--config", help="objective config JSON")
    relations = _Parser(add_help=False)
    relations.add_argument("--stats", help="relation statistics JSON (default: bundled)")
    relations.add_argument("--semantic", help="semantic table JSON (default: bundled)")
    relations.add_argument("--k", type=int, default=2, help="mixture components for edge clustering")
    relations.add_argument("--tasks", help="task set JSON for the motion cost")

    parser = _Parser(prog="colayout", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", parents=[common, relations], help="groups and accessibility metrics")
    p.add_argument("scene")
    p.add_argument("--field", help="write the free-space field as a 16-bit PGM")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("optimize", parents=[common, relations], help="rearrange a scene")
    p.add_argument("scene")
    p.add_argument("--strategy", choices=["asa", "cma", "asa+cma"], default="asa+cma")
    p.add_argument("--out", help="layout JSON")
    p.add_argument("--out-scene", help="rearranged scene JSON")
    p.add_argument("--report", help="report JSON")
    p.add_argument("--stage1-evals", type=int, default=OptimizeConfig.stage1_evals)
    p.add_argument("--stage2-evals", type=int, default=OptimizeConfig.stage2_evals)
    p.add_argument("--snap-theta", type=_angle, default=None, help="snap headings to multiples, e.g. 90deg")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("stats-build", parents=[common], help="mine relation statistics from a scene corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--bin-width", type=float, default=DEFAULT_BIN_WIDTH)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_stats_build)

    p = sub.add_parser("compare", parents=[common, relations], help="before/after metrics")
    p.add_argument("before", nargs="?")
    p.add_argument("after", nargs="?")
    p.add_argument("--scene", help="base scene when BEFORE/AFTER are layout files")
    p.add_argument("--pairs-dir", help="directory of NAME_before.json / NAME_after.json pairs")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("render", parents=[common, relations], help="draw a scene as SVG")
    p.add_argument("scene")
    p.add_argument("--layout")
    p.add_argument("--out")
    p.add_argument("--scale", type=float, default=RenderStyle.scale, help="pixels per meter")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "optimize" and args.seed is None:
        parser.error("optimize requires --seed")
    try:
        return args.func(args)
    except (SceneError, ValueError, KeyError) as exc:
        print(f"colayout {args.command}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
