"""Rearrange the bundled bedroom and compare accessibility before and after.

Uses a reduced budget so it finishes in a few seconds; the CLI defaults
search longer. Run: python demos/04_optimize_bedroom.py
"""

from colayout import ObjectiveConfig, OptimizeConfig, build_graph, compare, extract_groups, load_scene, optimize_scene
from colayout.cli import bundled
from colayout.metrics import format_table
from colayout.relations import load_semantic, load_stats

scene = load_scene(bundled("bedroom_fig1.json"))
stats = load_stats(bundled("stats.json"))
groups = extract_groups(build_graph(scene, load_semantic(bundled("semantic.json")), stats))
config = ObjectiveConfig()

layout, report = optimize_scene(scene, groups, stats, config, OptimizeConfig(seed=0, stage1_evals=400, stage2_evals=1500))
print(f"collision-free result: {report['success']}, evaluations: {sum(s['nfev'] for s in report['stages'])}")
print(format_table(compare(scene, None, layout, config, groups, stats)))
