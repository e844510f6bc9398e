"""Regenerate the bundled semantic table, synthetic corpus, statistics and bedroom scene.

Run from the repository root:  python scripts/build_bundled_data.py
Output is deterministic.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from pathlib import Path

import numpy as np

from colayout.geometry import OrientedRect, Pose2, Room, rect_separation, room_protrusion
from colayout.relations import SemanticTable, stats_build
from colayout.scene import RobotSpec, Scene, SceneObject, default_interaction_sides, save_scene, write_json

DATA = Path(__file__).resolve().parents[1] / "src" / "colayout" / "data"

LABELS = [
    "bed", "nightstand", "wardrobe", "dresser", "desk", "chair", "office_chair", "table",
    "armchair", "sofa", "coffee_table", "tv_stand", "bookshelf", "cabinet", "shelf", "drawer",
    "floor_lamp", "plant", "dining_table", "stool", "ottoman", "piano", "bench", "fridge",
    "kitchen_cabinet",
]

STRONG = {
    ("bed", "nightstand"): 0.85, ("desk", "office_chair"): 0.85, ("desk", "chair"): 0.8,
    ("table", "chair"): 0.8, ("dining_table", "chair"): 0.85, ("dining_table", "stool"): 0.6,
    ("sofa", "coffee_table"): 0.85, ("sofa", "tv_stand"): 0.7, ("armchair", "coffee_table"): 0.7,
    ("sofa", "ottoman"): 0.7, ("bed", "dresser"): 0.5, ("bed", "wardrobe"): 0.45,
    ("piano", "bench"): 0.8, ("desk", "bookshelf"): 0.45, ("fridge", "kitchen_cabinet"): 0.7,
    ("sofa", "floor_lamp"): 0.4, ("armchair", "floor_lamp"): 0.45, ("table", "stool"): 0.55,
}
SYNONYMS = {
    ("chair", "armchair"): 0.9, ("chair", "office_chair"): 0.92, ("desk", "table"): 0.88,
    ("table", "dining_table"): 0.9, ("table", "coffee_table"): 0.85, ("cabinet", "drawer"): 0.8,
    ("cabinet", "kitchen_cabinet"): 0.9, ("shelf", "bookshelf"): 0.9, ("sofa", "armchair"): 0.8,
    ("chair", "stool"): 0.75, ("dresser", "drawer"): 0.8, ("wardrobe", "cabinet"): 0.75,
}


def weak_strength(a: str, b: str) -> float:
    digest = hashlib.sha256(f"{min(a, b)}|{max(a, b)}".encode()).digest()
    return round(0.05 + 0.25 * digest[0] / 255.0, 3)


def semantic_table() -> dict:
    pairs = []
    for a, b in itertools.combinations_with_replacement(sorted(LABELS), 2):
        key = (a, b)
        if key in STRONG or key[::-1] in STRONG:
            h, is_a = STRONG.get(key, STRONG.get(key[::-1])), False
        elif key in SYNONYMS or key[::-1] in SYNONYMS:
            h, is_a = SYNONYMS.get(key, SYNONYMS.get(key[::-1])), True
        elif a == b:
            h, is_a = 1.0, True
        else:
            h, is_a = weak_strength(a, b), False
        pairs.append({"a": a, "b": b, "h": h, "is_a": is_a})
    return {"format_version": 1, "pairs": pairs}


SIZES = {
    "bed": (1.0, 0.8), "nightstand": (0.25, 0.25), "wardrobe": (0.3, 0.6), "dresser": (0.25, 0.5),
    "desk": (0.35, 0.7), "chair": (0.25, 0.25), "office_chair": (0.3, 0.3), "table": (0.3, 0.6),
    "armchair": (0.4, 0.4), "sofa": (0.45, 1.0), "coffee_table": (0.3, 0.5), "tv_stand": (0.25, 0.7),
    "bookshelf": (0.18, 0.5), "cabinet": (0.25, 0.45), "floor_lamp": (0.15, 0.15),
    "plant": (0.2, 0.2), "dining_table": (0.5, 0.8), "stool": (0.2, 0.2), "ottoman": (0.3, 0.3),
}


class Builder:
    def __init__(self, rng: np.random.Generator, room: Room):
        self.rng, self.room, self.objects = rng, room, []

    def fits(self, rect: OrientedRect) -> bool:
        if room_protrusion(rect, self.room) > 0 or not self.room.contains((rect.pose.x, rect.pose.y)):
            return False
        return all(rect_separation(rect, o.footprint) > 0.05 for o in self.objects)

    def add(self, label: str, pose: Pose2) -> bool:
        rect = OrientedRect(pose, *SIZES[label])
        if not self.fits(rect):
            return False
        oid = f"{label}_{sum(o.label == label for o in self.objects)}"
        self.objects.append(SceneObject(oid, label, rect, default_interaction_sides(label)))
        return True

    def random(self, label: str, tries: int = 200):
        for _ in range(tries):
            th = self.rng.choice([0.0, 0.5 * math.pi, math.pi, -0.5 * math.pi])
            pose = Pose2(self.rng.uniform(0.3, self.room.width - 0.3),
                         self.rng.uniform(0.3, self.room.height - 0.3), th)
            if self.add(label, pose):
                return pose
        return None

    def relative(self, label: str, anchor: Pose2, du: float, dv: float, dth: float, jitter: float = 0.05):
        u = du + self.rng.uniform(-jitter, jitter)
        v = dv + self.rng.uniform(-jitter, jitter)
        x, y = anchor.to_world(np.array([u, v]))
        return self.add(label, Pose2(float(x), float(y), anchor.theta + dth))


def bedroom(b: Builder):
    bed = b.random("bed")
    if bed is None:
        return False
    for side in (1.0, -1.0)[: 1 + int(b.rng.random() < 0.5)]:
        b.relative("nightstand", bed, -0.75, side * 1.1, 0.0)
    if b.rng.random() < 0.7:
        table = b.random("table")
        if table is not None:
            b.relative("chair", table, 0.65, 0.0, math.pi)
    for extra in ("bookshelf", "cabinet", "wardrobe", "dresser", "plant"):
        if b.rng.random() < 0.5:
            b.random(extra)
    return True


def living(b: Builder):
    sofa = b.random("sofa")
    if sofa is None:
        return False
    b.relative("coffee_table", sofa, 1.0, 0.0, 0.0, 0.08)
    b.relative("tv_stand", sofa, 2.8, 0.0, math.pi, 0.1)
    if b.rng.random() < 0.6:
        b.relative("armchair", sofa, 1.0, 1.2, -0.5 * math.pi, 0.1)
    for extra in ("bookshelf", "plant", "floor_lamp", "cabinet"):
        if b.rng.random() < 0.5:
            b.random(extra)
    return True


def office(b: Builder):
    desk = b.random("desk")
    if desk is None:
        return False
    b.relative("office_chair", desk, 0.75, 0.0, math.pi)
    for extra in ("bookshelf", "cabinet", "plant", "chair"):
        if b.rng.random() < 0.6:
            b.random(extra)
    if b.rng.random() < 0.4:
        table = b.random("table")
        if table is not None:
            b.relative("chair", table, 0.65, 0.0, math.pi)
    return True


def dining(b: Builder):
    t = b.random("dining_table")
    if t is None:
        return False
    for du, dv, dth in ((0.0, 1.1, -0.5 * math.pi), (0.0, -1.1, 0.5 * math.pi),
                        (0.4, 1.1, -0.5 * math.pi), (-0.4, -1.1, 0.5 * math.pi)):
        if b.rng.random() < 0.8:
            b.relative("chair", t, du, dv, dth)
    for extra in ("cabinet", "plant"):
        if b.rng.random() < 0.5:
            b.random(extra)
    return True


def corpus(seed: int = 7):
    rng = np.random.default_rng(seed)
    kinds = [("bedroom", bedroom, 60), ("living", living, 30), ("office", office, 25), ("dining", dining, 20)]
    scenes = []
    for name, fn, count in kinds:
        made = 0
        while made < count:
            room = Room(round(rng.uniform(4.0, 6.0), 2), round(rng.uniform(3.5, 5.0), 2))
            b = Builder(rng, room)
            if fn(b) and len(b.objects) >= 2:
                scenes.append((f"{name}_{made:03d}", Scene(room, tuple(b.objects), RobotSpec())))
                made += 1
    return scenes


def obj(oid, label, x, y, th, hx, hy, sides=None, movable=True):
    return {"id": oid, "label": label, "pose": [x, y, th], "half_extents": [hx, hy],
            "interaction_sides": sides if sides is not None else sorted(default_interaction_sides(label)),
            "movable": movable}


def bedroom_fig1() -> dict:
    """Compact bedroom whose lower-left corner is sealed off by two passages narrower than the robot."""
    half_pi = 0.5 * math.pi
    width, height = 4.4, 3.8
    return {
        "format_version": 1,
        "room": {"width": width, "height": height},
        "robot": {"r_b": 0.3, "d_max": 0.6, "seed_hint": [width - 0.4, 0.4]},
        "objects": [
            obj("bed", "bed", 1.05, height - 0.85, 0.0, 1.0, 0.8, ["front", "left", "right"]),
            obj("nightstand", "nightstand", 0.3, height - 1.95, 0.0, 0.25, 0.25, ["front"]),
            obj("chair", "chair", width - 1.0, height - 1.0, half_pi, 0.25, 0.25),
            obj("table", "table", width - 1.0, height - 0.35, -half_pi, 0.3, 0.6),
            obj("bookshelf", "bookshelf", 2.4, 1.2, -math.pi, 0.18, 0.5, ["front"]),
            obj("cabinet", "cabinet", 1.3, 0.3, half_pi, 0.25, 0.45, ["front"]),
        ],
    }


def main():
    DATA.mkdir(parents=True, exist_ok=True)
    write_json(semantic_table(), DATA / "semantic.json")
    SemanticTable.from_json(json.loads((DATA / "semantic.json").read_text()))
    corpus_dir = DATA / "corpus"
    corpus_dir.mkdir(exist_ok=True)
    for old in corpus_dir.glob("*.json"):
        old.unlink()
    scenes = corpus()
    for name, scene in scenes:
        save_scene(scene, corpus_dir / f"{name}.json")
    write_json(stats_build([s for _, s in scenes], 0.25).to_json(), DATA / "stats.json")
    write_json(bedroom_fig1(), DATA / "bedroom_fig1.json")
    write_json({"alpha": 0.1, "beta": 1.0, "gamma": 0.0, "collision_penalty": 10.0, "resolution": 0.05},
               DATA / "config.json")
    print(f"wrote {len(scenes)} corpus scenes to {corpus_dir}")


if __name__ == "__main__":
    main()
