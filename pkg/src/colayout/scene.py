"""Scene data model, JSON (de)serialization and layouts."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping

from .geometry import OrientedRect, Pose2, Room, room_protrusion

FORMAT_VERSION = 1
SIDES = ("front", "back", "left", "right")

_FRONT_ONLY = ("cabinet", "drawer", "dresser", "shelf", "bookshelf", "wardrobe", "closet",
               "fridge", "refrigerator", "oven", "dishwasher", "tv_stand", "sink")
_NO_BACK = ("bed", "sofa", "couch", "armchair", "loveseat")


class SceneError(ValueError):
    """Raised for unreadable or invalid scene-related files."""


def check_format_version(data: Mapping, what: str) -> None:
    """Reject files written by an incompatible major format version."""
    version = data.get("format_version", FORMAT_VERSION)
    if not isinstance(version, int) or version != FORMAT_VERSION:
        raise SceneError(f"{what}: unsupported format_version {version!r} (expected {FORMAT_VERSION})")


def default_interaction_sides(label: str) -> frozenset[str]:
    name = label.lower()
    if any(k in name for k in _FRONT_ONLY):
        return frozenset({"front"})
    if any(k in name for k in _NO_BACK):
        return frozenset({"front", "left", "right"})
    return frozenset(SIDES)


@dataclass(frozen=True)
class RobotSpec:
    r_b: float = 0.3
    d_max: float = 0.6
    seed_hint: tuple[float, float] | None = None

    def __post_init__(self):
        if not self.r_b > 0:
            raise SceneError(f"robot.r_b must be > 0, got {self.r_b}")
        if not self.d_max > 0:
            raise SceneError(f"robot.d_max must be > 0, got {self.d_max}")
        if self.seed_hint is not None:
            object.__setattr__(self, "seed_hint", (float(self.seed_hint[0]), float(self.seed_hint[1])))


@dataclass(frozen=True)
class SceneObject:
    id: str
    label: str
    footprint: OrientedRect
    interaction_sides: frozenset[str] = frozenset(SIDES)
    movable: bool = True

    @property
    def pose(self) -> Pose2:
        return self.footprint.pose


@dataclass(frozen=True)
class Scene:
    room: Room
    objects: tuple[SceneObject, ...]
    robot: RobotSpec = field(default_factory=RobotSpec)

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        self.validate()

    def validate(self) -> None:
        if not self.objects:
            raise SceneError("objects: scene must contain at least one object")
        seen = set()
        for k, obj in enumerate(self.objects):
            where = f"objects[{k}] (id={obj.id!r})"
            if obj.id in seen:
                raise SceneError(f"{where}: duplicate id")
            seen.add(obj.id)
            bad = set(obj.interaction_sides) - set(SIDES)
            if bad:
                raise SceneError(f"{where}.interaction_sides: unknown sides {sorted(bad)}")
            if not self.room.contains((obj.pose.x, obj.pose.y)):
                raise SceneError(f"{where}.pose: center lies outside the room")

    def __getitem__(self, object_id: str) -> SceneObject:
        for obj in self.objects:
            if obj.id == object_id:
                return obj
        raise KeyError(object_id)

    @property
    def ids(self) -> list[str]:
        return [o.id for o in self.objects]

    @property
    def movable_ids(self) -> list[str]:
        return [o.id for o in self.objects if o.movable]

    def layout(self) -> "Layout":
        return Layout({o.id: o.pose for o in self.objects if o.movable})

    def subscene(self, ids) -> "Scene":
        keep = set(ids)
        return replace(self, objects=tuple(o for o in self.objects if o.id in keep))

    def with_objects(self, objects, validate: bool = True) -> "Scene":
        """Copy with a new object list; optimizer candidates skip validation."""
        if validate:
            return replace(self, objects=tuple(objects))
        new = object.__new__(Scene)
        object.__setattr__(new, "room", self.room)
        object.__setattr__(new, "objects", tuple(objects))
        object.__setattr__(new, "robot", self.robot)
        return new

    def footprints_inside_room(self, tol: float = 1e-9) -> bool:
        return all(room_protrusion(o.footprint, self.room) <= tol for o in self.objects)


@dataclass(frozen=True)
class Layout:
    """Poses of the movable objects of a scene, keyed by object id."""

    poses: Mapping[str, Pose2]

    def __post_init__(self):
        object.__setattr__(self, "poses", dict(self.poses))

    def __getitem__(self, object_id: str) -> Pose2:
        return self.poses[object_id]

    def to_json(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "poses": {k: [p.x, p.y, p.theta] for k, p in sorted(self.poses.items())},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Layout":
        check_format_version(data, "layout")
        try:
            return cls({k: Pose2(*map(float, v)) for k, v in data["poses"].items()})
        except (KeyError, TypeError, ValueError) as exc:
            raise SceneError(f"layout.poses: {exc}") from exc


def apply_layout(scene: Scene, layout: Layout) -> Scene:
    """Return a copy of ``scene`` with the movable objects moved to ``layout``."""
    movable = set(scene.movable_ids)
    unknown = set(layout.poses) - movable
    if unknown:
        raise SceneError(f"layout references unknown or immovable ids {sorted(unknown)}")
    missing = movable - set(layout.poses)
    if missing:
        raise SceneError(f"layout is missing movable ids {sorted(missing)}")
    objects = tuple(
        replace(o, footprint=o.footprint.moved(layout[o.id])) if o.movable else o
        for o in scene.objects
    )
    return replace(scene, objects=objects)


# --- JSON -------------------------------------------------------------------

def scene_to_json(scene: Scene) -> dict:
    robot = scene.robot
    return {
        "format_version": FORMAT_VERSION,
        "room": {"width": scene.room.width, "height": scene.room.height},
        "robot": {
            "r_b": robot.r_b,
            "d_max": robot.d_max,
            "seed_hint": list(robot.seed_hint) if robot.seed_hint is not None else None,
        },
        "objects": [
            {
                "id": o.id,
                "label": o.label,
                "pose": [o.pose.x, o.pose.y, o.pose.theta],
                "half_extents": [o.footprint.hx, o.footprint.hy],
                "interaction_sides": [s for s in SIDES if s in o.interaction_sides],
                "movable": o.movable,
            }
            for o in scene.objects
        ],
    }


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise SceneError(f"{where}: expected a finite number, got {value!r}")
    return float(value)


def _vector(value, n: int, where: str) -> list[float]:
    if not isinstance(value, (list, tuple)) or len(value) != n:
        raise SceneError(f"{where}: expected a list of {n} numbers, got {value!r}")
    return [_number(v, f"{where}[{k}]") for k, v in enumerate(value)]


def scene_from_json(data: Mapping) -> Scene:
    if not isinstance(data, Mapping):
        raise SceneError("scene: top level must be an object")
    check_format_version(data, "scene")
    try:
        room_d = data["room"]
        room = Room(_number(room_d["width"], "room.width"), _number(room_d["height"], "room.height"))
    except KeyError as exc:
        raise SceneError(f"room: missing field {exc}") from exc
    except ValueError as exc:
        if isinstance(exc, SceneError):
            raise
        raise SceneError(f"room: {exc}") from exc

    robot_d = data.get("robot") or {}
    hint = robot_d.get("seed_hint")
    robot = RobotSpec(
        r_b=_number(robot_d.get("r_b", RobotSpec.r_b), "robot.r_b"),
        d_max=_number(robot_d.get("d_max", RobotSpec.d_max), "robot.d_max"),
        seed_hint=tuple(_vector(hint, 2, "robot.seed_hint")) if hint is not None else None,
    )

    raw_objects = data.get("objects")
    if not isinstance(raw_objects, list):
        raise SceneError("objects: expected a list")
    objects = []
    for k, od in enumerate(raw_objects):
        where = f"objects[{k}]"
        try:
            oid, label = od["id"], od["label"]
        except (KeyError, TypeError) as exc:
            raise SceneError(f"{where}: missing field {exc}") from exc
        if not isinstance(oid, str) or not isinstance(label, str):
            raise SceneError(f"{where}: id and label must be strings")
        x, y, th = _vector(od.get("pose"), 3, f"{where}.pose")
        hx, hy = _vector(od.get("half_extents"), 2, f"{where}.half_extents")
        if hx <= 0 or hy <= 0:
            raise SceneError(f"{where}.half_extents: must be positive")
        sides = od.get("interaction_sides")
        sides = default_interaction_sides(label) if sides is None else frozenset(sides)
        movable = od.get("movable", True)
        if not isinstance(movable, bool):
            raise SceneError(f"{where}.movable: expected a boolean")
        objects.append(SceneObject(oid, label, OrientedRect(Pose2(x, y, th), hx, hy), sides, movable))
    return Scene(room, tuple(objects), robot)


def read_json(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SceneError(f"{path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def write_json(data, path) -> None:
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=False) + "\n")


def load_scene(path) -> Scene:
    data = read_json(path)
    try:
        return scene_from_json(data)
    except SceneError as exc:
        raise SceneError(f"{path}: {exc}") from exc


def save_scene(scene: Scene, path) -> None:
    write_json(scene_to_json(scene), path)
