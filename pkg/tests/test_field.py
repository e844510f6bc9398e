import math
import numpy as np
import pytest
from scipy import ndimage
from scipy.sparse import lil_matrix
from scipy.sparse.csgraph import dijkstra

from colayout.field import (
    PathError,
    accessible_region,
    free_space,
    grid_shape,
    interaction_field,
    interaction_value,
    scene_sdf,
    shortest_path,
    write_pgm,
)
from colayout.geometry import Room
from colayout.scene import RobotSpec, Scene

from conftest import obj, random_scene
from oracles import fine_component, in_component, oracle_fb, oracle_sd


def empty_room(w=10.0, h=10.0, **robot):
    # a tiny pinned object far in a corner; scenes need one object
    return Scene(Room(w, h), (obj("pin", 0.02, 0.02, hx=0.01, hy=0.01, movable=False),), RobotSpec(**robot))


def test_grid_shape():
    assert grid_shape(Room(5, 4), 0.05) == (100, 80)
    assert grid_shape(Room(5.01, 4), 0.05) == (101, 80)
    with pytest.raises(ValueError):
        grid_shape(Room(1, 1), 0.5)


def test_empty_room_center_value():
    g = scene_sdf(empty_room(), 0.05)
    i, j = g.cell_of((5.0, 5.0))
    assert abs(g.values[i, j] - 5.0) <= 0.025 + 1e-12


def test_object_center_negative():
    s = Scene(Room(4, 4), (obj("a", 2.0, 2.0, 0.3),))
    g = scene_sdf(s, 0.05)
    assert g.values[g.cell_of((2.0, 2.0))] < 0


def test_sdf_matches_independent_oracle():
    rng = np.random.default_rng(10)
    for _ in range(20):
        s = random_scene(rng)
        g = scene_sdf(s, 0.05)
        c = g.centers()
        np.testing.assert_allclose(g.values, oracle_fb(s, c[..., 0], c[..., 1]), atol=1e-9, rtol=0)


def test_free_space_values():
    g = scene_sdf(empty_room(), 0.1)
    f = free_space(g, 0.3)
    assert np.array_equal(f.values + 0.3, g.values) or np.allclose(f.values + 0.3, g.values, atol=1e-15)
    assert np.array_equal(f.values, g.values - 0.3)
    from colayout.field import FieldGrid

    probe = FieldGrid(0.1, np.array([[0.3, 1.3, 0.0]]))
    np.testing.assert_array_equal(free_space(probe, 0.3).values, [[0.0, 1.0, -0.3]])
    with pytest.raises(ValueError):
        free_space(g, 0.0)


def test_empty_room_region():
    s = empty_room(4, 3, r_b=0.3)
    f = free_space(scene_sdf(s, 0.05), 0.3)
    reg = accessible_region(f, (2.0, 1.5))
    assert np.array_equal(reg.mask, f.values > 0)
    assert reg.area == int(reg.mask.sum()) * 0.05 * 0.05


def test_wall_split():
    wall = obj("wall", 2.0, 1.5, hx=0.1, hy=1.5, movable=False)
    s = Scene(Room(4, 3), (wall,), RobotSpec(r_b=0.2))
    f = free_space(scene_sdf(s, 0.05), 0.2)
    reg = accessible_region(f, (0.5, 1.5))
    xs = f.centers()[..., 0]
    assert reg.mask.any() and not (reg.mask & (xs > 2.0)).any()
    assert np.array_equal(reg.mask, (f.values > 0) & (xs < 2.0))


def test_seed_fallback_and_errors():
    s = empty_room(4, 3, r_b=0.3)
    f = free_space(scene_sdf(s, 0.05), 0.3)
    reg = accessible_region(f)
    assert f.values[reg.seed_cell] == f.values.max()
    with pytest.raises(ValueError):
        accessible_region(free_space(scene_sdf(s, 0.05), 5.0))


def test_region_connected_and_free():
    rng = np.random.default_rng(11)
    for _ in range(20):
        s = random_scene(rng)
        f = free_space(scene_sdf(s, 0.05), s.robot.r_b)
        if not (f.values > 0).any():
            continue
        reg = accessible_region(f, (0.3, 0.3))
        assert np.all(f.values[reg.mask] > 0)
        _, n = ndimage.label(reg.mask)
        assert n == 1 and reg.mask[reg.seed_cell]


def test_shrinking_radius_grows_mask():
    rng = np.random.default_rng(12)
    for _ in range(20):
        s = random_scene(rng)
        g = scene_sdf(s, 0.05)
        big = free_space(g, 0.3)
        if not (big.values > 0).any():
            continue
        reg = accessible_region(big, (0.4, 0.4))
        hint = big.center_of(reg.seed_cell)
        small = accessible_region(free_space(g, 0.2), hint)
        assert small.seed_cell == reg.seed_cell
        assert np.all(small.mask[reg.mask])


def monte_carlo_area(scene, seed_point, n=100_000, fine=0.01, rng=None):
    comp = fine_component(scene, seed_point, fine)
    w, h = scene.room.width, scene.room.height
    p = rng.uniform((0, 0), (w, h), (n, 2))
    ok = oracle_fb(scene, p[:, 0], p[:, 1]) - scene.robot.r_b > 0
    return w * h * np.mean(ok & in_component(comp, p, fine))


def test_region_area_matches_monte_carlo():
    rng = np.random.default_rng(13)
    done = 0
    while done < 8:
        s = random_scene(rng, n_objects=3, width=5.0, height=4.0)
        f = free_space(scene_sdf(s, 0.05), s.robot.r_b)
        if not (f.values > 0).any():
            continue
        reg = accessible_region(f)
        mc = monte_carlo_area(s, f.center_of(reg.seed_cell), rng=rng)
        assert reg.area == pytest.approx(mc, rel=0.03)
        done += 1


def cabinet_scene(d_max=0.6):
    cab = obj("cab", 2.0, 2.0, 0.0, hx=0.5, hy=0.25, label="cabinet", sides={"front"})
    return Scene(Room(4, 4), (cab,), RobotSpec(r_b=0.2, d_max=d_max))


def test_interaction_probes():
    s = cabinet_scene(0.5)
    cab = s["cab"]
    assert interaction_value((2.5, 2.0), cab, 0.5) == 1.0
    assert interaction_value((3.0, 2.0), cab, 0.5) == 0.0
    assert interaction_value((2.75, 2.0), cab, 0.5) == pytest.approx(0.5, abs=1e-9)
    assert interaction_value((1.25, 2.0), cab, 0.5) == pytest.approx(-0.5, abs=1e-9)
    assert interaction_value((2.0, 2.5), cab, 0.5) == pytest.approx(-0.5, abs=1e-9)
    assert interaction_value((2.0, 3.0), cab, 0.5) == 0.0


def test_interaction_rotated():
    cab = obj("cab", 2.0, 2.0, math.pi / 2, hx=0.5, hy=0.25, sides={"front"})
    # front now faces +y
    assert interaction_value((2.0, 2.75), cab, 0.5) == pytest.approx(0.5, abs=1e-9)
    assert interaction_value((2.0, 1.25), cab, 0.5) == pytest.approx(-0.5, abs=1e-9)


def test_interaction_field_support():
    rng = np.random.default_rng(14)
    for _ in range(10):
        s = random_scene(rng)
        g = scene_sdf(s, 0.05)
        pts = g.centers()
        for o in s.objects:
            fi = interaction_field(s, o.id, g).values
            assert np.all(np.abs(fi) <= 1.0)
            d = oracle_sd(pts[..., 0], pts[..., 1], o)
            assert np.all(fi[d >= s.robot.d_max] == 0.0)


def test_interaction_unknown_id():
    s = cabinet_scene()
    with pytest.raises(KeyError):
        interaction_field(s, "nope", scene_sdf(s, 0.1))


def open_region(w=4.0, h=3.0, res=0.05):
    s = empty_room(w, h, r_b=0.1)
    return accessible_region(free_space(scene_sdf(s, res), 0.1), (w / 2, h / 2))


def test_path_trivial_cases():
    reg = open_region()
    assert shortest_path(reg, (1.02, 1.02), (1.02, 1.02)) == 0.0
    assert shortest_path(reg, (1.02, 1.02), (1.52, 1.02)) == pytest.approx(10 * 0.05, abs=1e-12)
    assert shortest_path(reg, (1.02, 1.02), (1.52, 1.52)) == pytest.approx(10 * 0.05 * math.sqrt(2), abs=1e-12)
    with pytest.raises(PathError):
        shortest_path(reg, (0.01, 0.01), (1.0, 1.0))


def dijkstra_length(mask, a, b, res):
    nx, ny = mask.shape
    idx = lambda i, j: i * ny + j  # noqa: E731
    adj = lil_matrix((nx * ny, nx * ny))
    for i in range(nx):
        for j in range(ny):
            if not mask[i, j]:
                continue
            for di in (-1, 0, 1):
                for dj in (-1, 0, 1):
                    a2, b2 = i + di, j + dj
                    if (di, dj) == (0, 0) or not (0 <= a2 < nx and 0 <= b2 < ny) or not mask[a2, b2]:
                        continue
                    if di and dj and not (mask[i + di, j] and mask[i, j + dj]):
                        continue
                    adj[idx(i, j), idx(a2, b2)] = res * (math.sqrt(2) if di and dj else 1.0)
    d = dijkstra(adj.tocsr(), indices=idx(*a))
    return d[idx(*b)]


def test_path_matches_dijkstra_on_mazes():
    from colayout.field import AccessibleRegion

    rng = np.random.default_rng(15)
    res = 0.1
    for _ in range(30):
        mask = rng.random((18, 14)) > 0.3
        free = np.argwhere(mask)
        a, b = (tuple(free[k]) for k in rng.choice(len(free), 2, replace=False))
        reg = AccessibleRegion(mask, a, res)
        pa, pb = (np.asarray(a) + 0.5) * res, (np.asarray(b) + 0.5) * res
        expected = dijkstra_length(mask, a, b, res)
        if np.isinf(expected):
            with pytest.raises(PathError):
                shortest_path(reg, pa, pb)
            continue
        got = shortest_path(reg, pa, pb)
        assert got == pytest.approx(expected, abs=1e-9)
        assert shortest_path(reg, pb, pa) == got


def test_write_pgm(tmp_path):
    g = scene_sdf(cabinet_scene(), 0.1)
    write_pgm(g, tmp_path / "f.pgm")
    data = (tmp_path / "f.pgm").read_bytes()
    header = b"P5\n40 40\n65535\n"
    assert data.startswith(header)
    assert len(data) == len(header) + 40 * 40 * 2


def test_sub_cell_passage_needs_finer_grid():
    # a wall with a 0.2 m slot; r_b = 0.09 leaves a 0.02 m wide free strip through it
    wall = (obj("a", 2.0, 0.7, hx=0.1, hy=0.7, movable=False), obj("b", 2.0, 2.3, hx=0.1, hy=0.7, movable=False))
    s = Scene(Room(4, 3), wall, RobotSpec(r_b=0.09, d_max=0.3))
    areas = {}
    for res in (0.05, 0.005):
        reg = accessible_region(free_space(scene_sdf(s, res), 0.09), (1.0, 1.5))
        areas[res] = reg.mask.sum() * res * res
    assert areas[0.05] < 0.55 * areas[0.005]
    assert areas[0.005] > 9.5
