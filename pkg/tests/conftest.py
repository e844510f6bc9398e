import math
from importlib import resources
from pathlib import Path

import numpy as np
import pytest

from colayout.geometry import OrientedRect, Pose2, Room
from colayout.relations import load_semantic, load_stats
from colayout.scene import RobotSpec, Scene, SceneObject, default_interaction_sides, load_scene

DATA = Path(str(resources.files("colayout") / "data"))


def rect(x, y, theta, hx, hy):
    return OrientedRect(Pose2(x, y, theta), hx, hy)


def obj(id, x, y, theta=0.0, hx=0.5, hy=0.5, label=None, sides=None, movable=True):
    kw = {} if sides is None else {"interaction_sides": frozenset(sides)}
    return SceneObject(id, label or id, rect(x, y, theta, hx, hy), movable=movable, **kw)


def random_rect(rng, lo=-3.0, hi=3.0, hmin=0.1, hmax=1.0):
    return rect(*rng.uniform(lo, hi, 2), rng.uniform(-math.pi, math.pi), *rng.uniform(hmin, hmax, 2))


def random_scene(rng, n_objects=None, width=None, height=None, labels=None, robot=None):
    """Objects scattered in a room; overlaps are allowed."""
    w = width or rng.uniform(3.0, 6.0)
    h = height or rng.uniform(3.0, 6.0)
    n = n_objects or int(rng.integers(1, 6))
    labels = labels or ["bed", "nightstand", "chair", "table", "cabinet", "sofa", "desk"]
    objs = []
    for k in range(n):
        hx, hy = rng.uniform(0.15, 0.8, 2)
        label = str(labels[int(rng.integers(len(labels)))])
        objs.append(SceneObject(
            f"o{k}",
            label,
            rect(rng.uniform(0.2, w - 0.2), rng.uniform(0.2, h - 0.2), rng.uniform(-math.pi, math.pi), hx, hy),
            default_interaction_sides(label),
        ))
    if robot is None:
        robot = RobotSpec(r_b=rng.uniform(0.15, 0.35), d_max=rng.uniform(0.3, 0.8))
    return Scene(Room(w, h), tuple(objs), robot)


def boundary_points(r: OrientedRect, n: int) -> np.ndarray:
    """n points spread uniformly by arc length over the rectangle boundary."""
    c = r.corners()
    seg = np.roll(c, -1, axis=0) - c
    lengths = np.linalg.norm(seg, axis=1)
    s = np.linspace(0.0, lengths.sum(), n, endpoint=False)
    edge = np.searchsorted(np.cumsum(lengths), s, side="right")
    start = np.concatenate([[0.0], np.cumsum(lengths)[:-1]])
    t = (s - start[edge]) / lengths[edge]
    return c[edge] + t[:, None] * seg[edge]


def shapely_poly(r: OrientedRect):
    from shapely.geometry import Polygon

    return Polygon(r.corners())


@pytest.fixture(scope="session")
def bedroom():
    return load_scene(DATA / "bedroom_fig1.json")


@pytest.fixture(scope="session")
def semantic():
    return load_semantic(DATA / "semantic.json")


@pytest.fixture(scope="session")
def stats():
    return load_stats(DATA / "stats.json")


ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """Records one acceptance line, printed again in the terminal summary, then asserts it."""

    def record(number: int, title: str, ok: bool, detail: str = ""):
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
        request.config.stash.setdefault(ACCEPTANCE, {})[number] = line
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
