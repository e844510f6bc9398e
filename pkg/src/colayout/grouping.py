"""Functional groups from a scene graph via 1-D Gaussian-mixture clustering of edge weights."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.special import logsumexp

from .relations import SceneGraph

VAR_FLOOR = 1e-8


@dataclass(frozen=True)
class Gmm1D:
    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray
    loglik: float
    trace: tuple[float, ...] = field(default=(), compare=False)

    @property
    def K(self) -> int:
        return len(self.means)

    def _log_joint(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)[:, None]
        with np.errstate(divide="ignore"):
            log_w = np.log(self.weights)
        return (
            log_w
            - 0.5 * np.log(2.0 * np.pi * self.variances)
            - 0.5 * (x - self.means) ** 2 / self.variances
        )

    def responsibilities(self, x) -> np.ndarray:
        lj = self._log_joint(x)
        return np.exp(lj - logsumexp(lj, axis=1, keepdims=True))

    def log_likelihood(self, x) -> float:
        return float(logsumexp(self._log_joint(x), axis=1).sum())

    def predict(self, x) -> np.ndarray:
        return np.argmax(self._log_joint(x), axis=1)


def _kmeans_pp(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    centers = [x[rng.integers(len(x))]]
    for _ in range(1, k):
        d2 = np.min((x[:, None] - np.array(centers)[None, :]) ** 2, axis=1)
        total = d2.sum()
        if total <= 0.0:
            centers.append(x[rng.integers(len(x))])
        else:
            centers.append(x[rng.choice(len(x), p=d2 / total)])
    return np.array(centers)


def _em(x, means, var_floor, tol, max_iter):
    n, k = len(x), len(means)
    labels = np.argmin(np.abs(x[:, None] - means[None, :]), axis=1)
    weights = np.array([max(np.mean(labels == j), 1.0 / n) for j in range(k)])
    weights /= weights.sum()
    spread = max(float(np.var(x)), var_floor)
    variances = np.array(
        [max(float(np.var(x[labels == j])), var_floor) if np.sum(labels == j) > 1 else spread
         for j in range(k)]
    )
    gmm = Gmm1D(weights, means.astype(float), variances, -np.inf)
    trace = []
    prev = -np.inf
    for _ in range(max_iter):
        lj = gmm._log_joint(x)
        ll = float(logsumexp(lj, axis=1).sum())
        trace.append(ll)
        if ll - prev < tol:
            break
        prev = ll
        resp = np.exp(lj - logsumexp(lj, axis=1, keepdims=True))
        nk = resp.sum(axis=0)
        safe = np.maximum(nk, 1e-300)
        means = (resp * x[:, None]).sum(axis=0) / safe
        variances = np.maximum((resp * (x[:, None] - means) ** 2).sum(axis=0) / safe, var_floor)
        # a component that lost every sample keeps its previous location
        dead = nk < 1e-300
        means[dead] = gmm.means[dead]
        variances[dead] = gmm.variances[dead]
        gmm = Gmm1D(nk / n, means, variances, ll)
    return Gmm1D(gmm.weights, gmm.means, gmm.variances, trace[-1], tuple(trace))


def fit_gmm_1d(
    samples: Sequence[float],
    K: int,
    seed: int = 0,
    restarts: int = 5,
    tol: float = 1e-8,
    max_iter: int = 500,
    var_floor: float = VAR_FLOOR,
) -> Gmm1D:
    """Fit a K-component 1-D Gaussian mixture by EM from k-means++ starts.

    The best of ``restarts`` runs by final log-likelihood is returned; its
    per-iteration log-likelihood is kept in ``trace``.
    """
    x = np.asarray(samples, dtype=float).ravel()
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    if len(x) < K:
        raise ValueError(f"need at least K={K} samples, got {len(x)}")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(max(1, restarts)):
        gmm = _em(x, _kmeans_pp(x, K, rng), var_floor, tol, max_iter)
        if best is None or gmm.loglik > best.loglik:
            best = gmm
    return best


@dataclass(frozen=True)
class FunctionalGroups:
    groups: tuple[tuple[str, ...], ...]
    kept_edges: Mapping[tuple[str, str], float]

    def group_of(self, object_id: str) -> tuple[str, ...]:
        for g in self.groups:
            if object_id in g:
                return g
        raise KeyError(object_id)

    def to_json(self) -> dict:
        return {
            "groups": [list(g) for g in self.groups],
            "kept_edges": [[a, b, w] for (a, b), w in self.kept_edges.items()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "FunctionalGroups":
        return cls(
            tuple(tuple(g) for g in data["groups"]),
            {(a, b): float(w) for a, b, w in data.get("kept_edges", [])},
        )


def connected_components(nodes: Sequence[str], edges) -> tuple[tuple[str, ...], ...]:
    parent = {n: n for n in nodes}

    def find(n):
        while parent[n] != n:
            parent[n] = parent[parent[n]]
            n = parent[n]
        return n

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb, key=nodes.index)] = min(ra, rb, key=nodes.index)
    comps: dict[str, list[str]] = {}
    for n in nodes:
        comps.setdefault(find(n), []).append(n)
    return tuple(tuple(c) for c in comps.values())


def extract_groups(graph: SceneGraph, K: int = 2, seed: int = 0, mean_tol: float = 1e-6) -> FunctionalGroups:
    """Keep the edges of the highest-mean mixture component; groups are its connected components.

    Any edge at least as heavy as a kept edge is kept too, so the survivors
    are always the heaviest edges.
    """
    keys = list(graph.edges)
    if not keys:
        raise ValueError("graph has no edges")
    w = np.array([graph.edges[k] for k in keys])
    gmm = fit_gmm_1d(w, min(K, len(w)), seed=seed)
    if np.ptp(gmm.means) < mean_tol:
        keep = np.ones(len(w), dtype=bool)
    else:
        top = int(np.argmax(gmm.means))
        keep = gmm.predict(w) == top
        if keep.any():
            keep = w >= w[keep].min()
        else:
            keep = w >= w.max()
    kept = {k: float(graph.edges[k]) for k, m in zip(keys, keep) if m}
    return FunctionalGroups(connected_components(list(graph.nodes), kept), kept)
