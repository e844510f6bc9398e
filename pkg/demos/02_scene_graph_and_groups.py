"""From corpus statistics to a weighted scene graph and functional groups.

Run: python demos/02_scene_graph_and_groups.py
"""

from colayout import build_graph, cooccur_prob, extract_groups, load_scene
from colayout.cli import bundled
from colayout.relations import load_semantic, load_stats

scene = load_scene(bundled("bedroom_fig1.json"))
semantic = load_semantic(bundled("semantic.json"))
stats = load_stats(bundled("stats.json"))

print(f"P(bed, nightstand co-occur) = {cooccur_prob(stats, 'bed', 'nightstand'):.3f}")

graph = build_graph(scene, semantic, stats)
print("edge weights (sum to 1):")
for (a, b), w in sorted(graph.edges.items(), key=lambda kv: -kv[1]):
    print(f"  {a:>12s} - {b:<12s} {w:.4f}")

groups = extract_groups(graph)
print("functional groups:", [list(g) for g in groups.groups])
print("kept edges:", sorted(groups.kept_edges))
