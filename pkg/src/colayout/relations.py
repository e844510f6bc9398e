"""Pairwise object relations: semantic strength, corpus co-occurrence and the scene graph."""

from __future__ import annotations

import itertools
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .scene import FORMAT_VERSION, Scene, SceneError, check_format_version, read_json

DEFAULT_BIN_WIDTH = 0.25


def pair_key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


class RelationError(KeyError):
    """A label or label pair is missing from a relation table."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


# --- semantic relation --------------------------------------------------------

@dataclass(frozen=True)
class SemanticTable:
    """Offline stand-in for a knowledge-graph lookup of label-pair strengths.

    Identical labels are treated as synonyms even when not flagged.
    """

    strength: Mapping[tuple[str, str], float]
    is_a: frozenset = frozenset()

    def __post_init__(self):
        strength = {pair_key(*k): float(v) for k, v in self.strength.items()}
        for k, h in strength.items():
            if not 0.0 <= h <= 1.0:
                raise ValueError(f"semantic strength for {k} must be in [0, 1], got {h}")
        is_a = frozenset(pair_key(*k) for k in self.is_a)
        for k in is_a:
            if k not in strength:
                raise ValueError(f"is_a pair {k} has no strength entry")
        object.__setattr__(self, "strength", strength)
        object.__setattr__(self, "is_a", is_a)
        object.__setattr__(self, "_labels", frozenset(itertools.chain.from_iterable(strength)))

    @property
    def labels(self) -> frozenset[str]:
        return self._labels

    def synonymous(self, a: str, b: str) -> bool:
        return a == b or pair_key(a, b) in self.is_a

    def h(self, a: str, b: str) -> float:
        for label in (a, b):
            if label not in self._labels:
                raise RelationError(f"label {label!r} is not in the semantic table")
        return self.strength.get(pair_key(a, b), 0.0)

    def to_json(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "pairs": [
                {"a": a, "b": b, "h": h, "is_a": (a, b) in self.is_a}
                for (a, b), h in sorted(self.strength.items())
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "SemanticTable":
        check_format_version(data, "semantic table")
        strength, is_a = {}, set()
        try:
            for k, p in enumerate(data["pairs"]):
                key = pair_key(str(p["a"]), str(p["b"]))
                strength[key] = float(p["h"])
                if p.get("is_a", False):
                    is_a.add(key)
        except (KeyError, TypeError, ValueError) as exc:
            raise SceneError(f"semantic table pairs: {exc}") from exc
        try:
            return cls(strength, frozenset(is_a))
        except ValueError as exc:
            raise SceneError(f"semantic table: {exc}") from exc


def semantic_strengths(table: SemanticTable, labels: Sequence[str]) -> dict[tuple[int, int], float]:
    """Synonym-corrected strengths h* for every object pair (i < j) of a scene."""
    pairs = list(itertools.combinations(range(len(labels)), 2))
    if not pairs:
        raise ValueError("semantic relation needs at least two objects")
    raw = {(i, j): table.h(labels[i], labels[j]) for i, j in pairs}
    plain = [raw[p] for p in pairs if not table.synonymous(labels[p[0]], labels[p[1]])]
    # all-synonym scenes have no neutral reference; fall back to equal strengths
    neutral = float(np.mean(plain)) if plain else 1.0
    return {
        (i, j): (neutral if table.synonymous(labels[i], labels[j]) else raw[i, j])
        for i, j in pairs
    }


def semantic_probs(table: SemanticTable, labels: Sequence[str]) -> dict[tuple[int, int], float]:
    """P_sem for every object pair (i < j); sums to one over the scene."""
    hstar = semantic_strengths(table, labels)
    total = math.fsum(hstar.values())
    if total <= 0.0:
        return {p: 1.0 / len(hstar) for p in hstar}
    return {p: h / total for p, h in hstar.items()}


def semantic_rel(table: SemanticTable, scene_labels: Sequence[str], o_i: str, o_j: str) -> float:
    """P_sem of the label pair (o_i, o_j) within a scene with the given labels."""
    labels = list(scene_labels)
    probs = semantic_probs(table, labels)
    for (i, j), p in probs.items():
        if pair_key(labels[i], labels[j]) == pair_key(o_i, o_j):
            return p
    raise RelationError(f"no object pair ({o_i!r}, {o_j!r}) in the scene")


# --- corpus statistics ---------------------------------------------------------

@dataclass(frozen=True)
class Histogram:
    """Center-distance histogram; bin k covers [k*w, (k+1)*w)."""

    bin_width: float
    counts: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.counts)

    def bin_index(self, d: float) -> int:
        return int(math.floor(d / self.bin_width))

    def density(self, d: float) -> float:
        if d < 0:
            raise ValueError(f"distance must be non-negative, got {d}")
        k = self.bin_index(d)
        total = self.total
        if total == 0 or k >= len(self.counts):
            return 0.0
        return self.counts[k] / (total * self.bin_width)

    def sup(self) -> float:
        total = self.total
        return max(self.counts) / (total * self.bin_width) if total else 0.0

    def modal_bin(self) -> int:
        return int(np.argmax(self.counts))

    def modal_distance(self) -> float:
        return (self.modal_bin() + 0.5) * self.bin_width


@dataclass(frozen=True)
class RelationStats:
    bin_width: float
    cooccur: Mapping[tuple[str, str], int]
    dist_hist: Mapping[tuple[str, str], Histogram]
    marginal: Mapping[str, int] = field(init=False, default=None, compare=False)

    def __post_init__(self):
        cooccur = {pair_key(*k): int(v) for k, v in self.cooccur.items()}
        hists = {pair_key(*k): v for k, v in self.dist_hist.items()}
        for k, n in cooccur.items():
            if k in hists and hists[k].total != n:
                raise ValueError(f"histogram total for {k} does not match count {n}")
        marginal: dict[str, int] = defaultdict(int)
        for (a, b), n in cooccur.items():
            marginal[a] += n
            if b != a:
                marginal[b] += n
        object.__setattr__(self, "cooccur", cooccur)
        object.__setattr__(self, "dist_hist", hists)
        object.__setattr__(self, "marginal", dict(marginal))

    def hist(self, a: str, b: str) -> Histogram | None:
        return self.dist_hist.get(pair_key(a, b))

    def merge(self, other: "RelationStats") -> "RelationStats":
        if other.bin_width != self.bin_width:
            raise ValueError("cannot merge statistics with different bin widths")
        counts = Counter(self.cooccur) + Counter(other.cooccur)
        hists = {}
        for k in counts:
            parts = [h.counts for h in (self.dist_hist.get(k), other.dist_hist.get(k)) if h]
            n = max(len(p) for p in parts)
            merged = np.zeros(n, dtype=int)
            for p in parts:
                merged[: len(p)] += p
            hists[k] = Histogram(self.bin_width, tuple(int(c) for c in merged))
        return RelationStats(self.bin_width, dict(counts), hists)

    def to_json(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "bin_width": self.bin_width,
            "pairs": [
                {"a": a, "b": b, "n": n, "hist": list(self.dist_hist[(a, b)].counts)}
                for (a, b), n in sorted(self.cooccur.items())
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "RelationStats":
        check_format_version(data, "relation stats")
        try:
            bw = float(data["bin_width"])
            cooccur, hists = {}, {}
            for p in data["pairs"]:
                key = pair_key(str(p["a"]), str(p["b"]))
                cooccur[key] = int(p["n"])
                hists[key] = Histogram(bw, tuple(int(c) for c in p["hist"]))
            return cls(bw, cooccur, hists)
        except (KeyError, TypeError, ValueError) as exc:
            raise SceneError(f"relation stats: {exc}") from exc


def stats_build(corpus: Iterable[Scene], bin_width: float = DEFAULT_BIN_WIDTH) -> RelationStats:
    """Count label co-occurrences and center distances over every object pair of a corpus."""
    if not bin_width > 0:
        raise ValueError("bin_width must be positive")
    cooccur: Counter = Counter()
    bins: dict[tuple[str, str], Counter] = defaultdict(Counter)
    n_scenes = 0
    for scene in corpus:
        n_scenes += 1
        for a, b in itertools.combinations(scene.objects, 2):
            key = pair_key(a.label, b.label)
            d = math.hypot(a.pose.x - b.pose.x, a.pose.y - b.pose.y)
            cooccur[key] += 1
            bins[key][int(math.floor(d / bin_width))] += 1
    if n_scenes == 0:
        raise ValueError("corpus is empty")
    hists = {}
    for key, c in bins.items():
        counts = [0] * (max(c) + 1)
        for k, v in c.items():
            counts[k] = v
        hists[key] = Histogram(bin_width, tuple(counts))
    return RelationStats(bin_width, dict(cooccur), hists)


def cooccur_prob(stats: RelationStats, o_i: str, o_j: str) -> float:
    for label in (o_i, o_j):
        if label not in stats.marginal:
            raise RelationError(f"label {label!r} does not occur in the statistics")
    denom = min(stats.marginal[o_i], stats.marginal[o_j])
    if denom == 0:
        raise ValueError(f"zero co-occurrence marginal for ({o_i!r}, {o_j!r})")
    return stats.cooccur.get(pair_key(o_i, o_j), 0) / denom


def spatial_rel(stats: RelationStats, o_i: str, o_j: str, d_ij: float) -> float:
    """Unnormalized spatial relation P_d(d | o_i, o_j) * P_co; zero for unseen pairs."""
    if d_ij < 0:
        raise ValueError(f"distance must be non-negative, got {d_ij}")
    hist = stats.hist(o_i, o_j)
    if hist is None or hist.total == 0:
        return 0.0
    return hist.density(d_ij) * cooccur_prob(stats, o_i, o_j)


# --- scene graph -------------------------------------------------------------

@dataclass(frozen=True)
class SceneGraph:
    nodes: tuple[str, ...]
    edges: Mapping[tuple[str, str], float]

    def weight(self, a: str, b: str) -> float:
        return self.edges[(a, b)] if (a, b) in self.edges else self.edges[(b, a)]


def center_distance(a, b) -> float:
    return math.hypot(a.pose.x - b.pose.x, a.pose.y - b.pose.y)


def build_graph(scene: Scene, table: SemanticTable, stats: RelationStats) -> SceneGraph:
    """Complete weighted graph w_ij proportional to P_sem * P_spa, normalized to sum to one."""
    objs = scene.objects
    if len(objs) < 2:
        raise ValueError("scene graph needs at least two objects")
    p_sem = semantic_probs(table, [o.label for o in objs])
    products = {}
    for (i, j), ps in p_sem.items():
        a, b = objs[i], objs[j]
        products[(a.id, b.id)] = ps * spatial_rel(stats, a.label, b.label, center_distance(a, b))
    z = math.fsum(products.values())
    if z <= 0.0:
        edges = {k: 1.0 / len(products) for k in products}
    else:
        edges = {k: v / z for k, v in products.items()}
    return SceneGraph(tuple(o.id for o in objs), edges)


def load_semantic(path) -> SemanticTable:
    return SemanticTable.from_json(read_json(path))


def load_stats(path) -> RelationStats:
    return RelationStats.from_json(read_json(path))
