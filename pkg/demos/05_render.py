"""Write before/after SVG drawings of the bedroom with the accessible region overlaid.

Run: python demos/05_render.py [OUT_DIR]
"""

import sys
from pathlib import Path

from colayout import OptimizeConfig, build_graph, extract_groups, load_scene, optimize_scene
from colayout.cli import bundled
from colayout.relations import load_semantic, load_stats
from colayout.render import render_svg

out = Path(sys.argv[1] if len(sys.argv) > 1 else ".")
scene = load_scene(bundled("bedroom_fig1.json"))
stats = load_stats(bundled("stats.json"))
groups = extract_groups(build_graph(scene, load_semantic(bundled("semantic.json")), stats))
layout, _ = optimize_scene(scene, groups, stats, opt=OptimizeConfig(seed=0, stage1_evals=400, stage2_evals=1500))

for name, lay in (("before", None), ("after", layout)):
    path = out / f"bedroom_{name}.svg"
    path.write_text(render_svg(scene, lay, groups))
    print("wrote", path)
