"""Signed distances, clearance and the accessible region of the bundled bedroom.

Run: python demos/01_distance_fields.py
"""

from colayout import accessible_region, free_space, load_scene, scene_sdf, sd_rect
from colayout.cli import bundled

scene = load_scene(bundled("bedroom_fig1.json"))
bed = scene["bed"]
print(f"room {scene.room.width} x {scene.room.height} m, {len(scene.objects)} objects")

# negative inside the footprint, zero on its boundary, positive outside
for q in [bed.pose.xy, (bed.pose.x + bed.footprint.hx, bed.pose.y), (0.1, 0.1)]:
    print(f"sd_rect({q[0]:.2f}, {q[1]:.2f}) to bed = {float(sd_rect(q, bed.footprint)):+.3f} m")

sdf = scene_sdf(scene, 0.05)
clearance = free_space(sdf, scene.robot.r_b)
region = accessible_region(clearance)
cells = int(region.mask.sum())
print(f"grid {sdf.values.shape}, {cells} accessible cells = {cells * 0.05**2:.3f} m2")
print(f"robot seed cell {region.seed_cell}, clearance there {clearance.values[region.seed_cell]:.3f} m")
