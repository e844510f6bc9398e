import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from colayout.geometry import Room
from colayout.relations import (
    Histogram,
    RelationError,
    RelationStats,
    SemanticTable,
    build_graph,
    cooccur_prob,
    pair_key,
    semantic_rel,
    spatial_rel,
    stats_build,
)
from colayout.scene import Scene

from conftest import obj, random_scene


def table(pairs, synonyms=()):
    return SemanticTable({pair_key(a, b): h for (a, b), h in pairs.items()},
                         frozenset(pair_key(a, b) for a, b in synonyms))


def test_uniform_semantic():
    t = table({("a", "b"): 0.5, ("a", "c"): 0.5, ("b", "c"): 0.5})
    labels = ["a", "b", "c"]
    for x, y in itertools.combinations(labels, 2):
        assert semantic_rel(t, labels, x, y) == pytest.approx(1 / 3, abs=1e-15)


def test_synonym_override():
    t = table({("chair", "bed"): 0.2, ("armchair", "bed"): 0.4, ("chair", "armchair"): 0.95},
              [("chair", "armchair")])
    labels = ["chair", "armchair", "bed"]
    assert semantic_rel(t, labels, "chair", "bed") == pytest.approx(0.2 / 0.9, abs=1e-12)
    assert semantic_rel(t, labels, "armchair", "bed") == pytest.approx(0.4 / 0.9, abs=1e-12)
    assert semantic_rel(t, labels, "chair", "armchair") == pytest.approx(0.3 / 0.9, abs=1e-12)


def test_single_pair_is_one():
    t = table({("a", "b"): 0.3})
    assert semantic_rel(t, ["a", "b"], "a", "b") == 1.0


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 1.0), st.integers(1, 3))
def test_synonyms_receive_common_value(c, n_syn):
    # labels s0..s{n_syn} are mutually synonymous, x and y are not
    syn = [f"s{k}" for k in range(n_syn + 1)]
    labels = syn + ["x", "y"]
    pairs, synonyms = {}, []
    for a, b in itertools.combinations(labels, 2):
        pairs[(a, b)] = 0.9 if (a in syn and b in syn) else c
        if a in syn and b in syn:
            synonyms.append((a, b))
    t = table(pairs, synonyms)
    n_pairs = len(labels) * (len(labels) - 1) // 2
    for a, b in itertools.combinations(labels, 2):
        assert semantic_rel(t, labels, a, b) == pytest.approx(1 / n_pairs, rel=1e-12)


def test_semantic_table_validation():
    with pytest.raises(ValueError):
        table({("a", "b"): 1.5})
    t = table({("a", "b"): 0.5})
    with pytest.raises(RelationError):
        t.h("a", "zzz")
    assert SemanticTable.from_json(t.to_json()) == t


def toy_stats():
    # marginals: a: 10, b: 5 (only pair (a,b)=5, (a,c)=5)
    return RelationStats(1.0, {pair_key("a", "b"): 5, pair_key("a", "c"): 5}, {})


def test_cooccur_arithmetic():
    s = toy_stats()
    assert s.marginal["a"] == 10 and s.marginal["b"] == 5
    assert cooccur_prob(s, "a", "b") == 1.0
    s2 = RelationStats(1.0, {pair_key("a", "b"): 5, pair_key("a", "c"): 5, pair_key("b", "c"): 0}, {})
    assert cooccur_prob(s2, "b", "c") == 0.0
    only = RelationStats(1.0, {pair_key("p", "q"): 7}, {})
    assert cooccur_prob(only, "p", "q") == 1.0


def test_cooccur_symmetric_and_unknown():
    s = toy_stats()
    assert cooccur_prob(s, "a", "c") == cooccur_prob(s, "c", "a")
    with pytest.raises(RelationError):
        cooccur_prob(s, "a", "zzz")


def test_histogram_density():
    h = Histogram(1.0, (1, 1, 1, 1))
    assert h.density(1.5) == 0.25
    assert h.density(4.5) == 0.0
    # marginals a = b = 8, so P_co(a, b) = 4 / 8
    s = RelationStats(1.0, {pair_key("a", "b"): 4, pair_key("a", "c"): 4, pair_key("b", "c"): 4},
                      {pair_key("a", "b"): h})
    assert cooccur_prob(s, "a", "b") == 0.5
    assert spatial_rel(s, "a", "b", 1.5) == 0.125
    assert spatial_rel(s, "a", "b", 9.0) == 0.0


def test_modal_bin_maximizes_density():
    h = Histogram(0.25, (0, 2, 7, 3))
    assert h.modal_bin() == 2
    assert h.density(h.modal_distance()) == h.sup() == max(h.density(0.25 * k + 0.1) for k in range(4))


def test_stats_build_counts():
    one = Scene(Room(4, 4), (obj("x", 1, 1, label="a"), obj("y", 2, 1, label="b")))
    s = stats_build([one], bin_width=0.5)
    assert s.cooccur[pair_key("a", "b")] == 1
    assert s.hist("a", "b").counts[2] == 1 and s.hist("a", "b").total == 1
    assert stats_build([one] * 10, 0.5).cooccur[pair_key("a", "b")] == 10


def test_stats_build_hand_counted_corpus():
    s1 = Scene(Room(5, 5), (obj("1", 1, 1, label="bed"), obj("2", 1, 2, label="lamp"), obj("3", 3, 1, label="desk")))
    s2 = Scene(Room(5, 5), (obj("1", 1, 1, label="bed"), obj("2", 2, 1, label="lamp")))
    s3 = Scene(Room(5, 5), (obj("1", 1, 1, label="desk"), obj("2", 1, 4, label="lamp")))
    s = stats_build([s1, s2, s3], 1.0)
    # N: bed-lamp 2, bed-desk 1, lamp-desk 2; marginals bed 3, lamp 4, desk 3
    assert cooccur_prob(s, "bed", "lamp") == 2 / 3
    assert cooccur_prob(s, "bed", "desk") == 1 / 3
    assert cooccur_prob(s, "desk", "lamp") == 2 / 3
    assert s.hist("bed", "lamp").counts == (0, 2)


def test_stats_build_permutation_invariant():
    rng = np.random.default_rng(5)
    corpus = [random_scene(rng) for _ in range(12)]
    a = stats_build(corpus)
    b = stats_build(corpus[::-1])
    assert a.to_json() == b.to_json()
    assert RelationStats.from_json(a.to_json()).to_json() == a.to_json()


def test_weights_normalized_on_random_scenes(semantic, stats):
    rng = np.random.default_rng(6)
    for _ in range(50):
        s = random_scene(rng, n_objects=int(rng.integers(2, 7)))
        g = build_graph(s, semantic, stats)
        w = np.array(list(g.edges.values()))
        assert (w >= 0).all()
        assert abs(w.sum() - 1.0) < 1e-9


def test_weight_ratios():
    # product 3x on one pair and 1x on two: weights 0.6, 0.2, 0.2
    t = table({("a", "b"): 0.6, ("a", "c"): 0.2, ("b", "c"): 0.2})
    flat = Histogram(1.0, (1, 1, 1, 1, 1, 1, 1, 1))
    st_ = RelationStats(1.0, {pair_key("a", "b"): 8, pair_key("a", "c"): 8, pair_key("b", "c"): 8},
                        {k: flat for k in [pair_key("a", "b"), pair_key("a", "c"), pair_key("b", "c")]})
    s = Scene(Room(6, 6), (obj("A", 1, 1, label="a"), obj("B", 2, 1, label="b"), obj("C", 1, 2, label="c")))
    g = build_graph(s, t, st_)
    assert g.weight("A", "B") == pytest.approx(0.6, abs=1e-12)
    assert g.weight("A", "C") == pytest.approx(0.2, abs=1e-12)
    assert g.weight("B", "C") == pytest.approx(0.2, abs=1e-12)


def test_zero_products_fall_back_to_uniform():
    t = table({("a", "b"): 0.5, ("a", "c"): 0.5, ("b", "c"): 0.5})
    empty = RelationStats(1.0, {pair_key("a", "b"): 0, pair_key("a", "c"): 1, pair_key("b", "c"): 1}, {})
    s = Scene(Room(6, 6), (obj("A", 1, 1, label="a"), obj("B", 2, 1, label="b"), obj("C", 1, 2, label="c")))
    g = build_graph(s, t, empty)
    assert set(g.edges.values()) == {1 / 3}
