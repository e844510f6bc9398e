"""(mu/mu_w, lambda)-CMA-ES with rank-one and rank-mu updates and cumulative step-size adaptation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .asa import SolverResult, _clip


@dataclass(frozen=True)
class CmaConfig:
    sigma0: float = 0.5
    lam: int | None = None  # None: 4 + floor(3 ln n)
    mu: int | None = None  # None: lam // 2
    max_evals: int = 10_000
    tol_f: float = 1e-10
    max_condition: float = 1e14
    seed: int = 0
    bound_penalty: float = 1e3

    def __post_init__(self):
        if not self.sigma0 > 0:
            raise ValueError("sigma0 must be positive")
        if self.lam is not None and self.lam < 2:
            raise ValueError("population size must be at least 2")
        if self.mu is not None and self.lam is not None and self.mu > self.lam:
            raise ValueError("mu must not exceed lambda")


def cma_minimize(
    f: Callable[[np.ndarray], float],
    x0,
    config: CmaConfig = CmaConfig(),
    bounds=None,
    callback: Callable | None = None,
) -> SolverResult:
    """Minimize ``f`` starting from mean ``x0``.

    Non-finite objective values rank worst. With ``bounds`` a candidate is
    evaluated at its projection onto the box plus a quadratic distance penalty.
    """
    m = np.array(x0, dtype=float).ravel()
    n = m.size
    if n < 1:
        raise ValueError("need at least one dimension")
    lower = upper = None
    if bounds is not None:
        lower = np.asarray(bounds[0], dtype=float) * np.ones(n)
        upper = np.asarray(bounds[1], dtype=float) * np.ones(n)
        m = _clip(m, lower, upper)

    def objective(x):
        if lower is None:
            return float(f(x))
        xc = _clip(x, lower, upper)
        return float(f(xc)) + config.bound_penalty * float(np.sum((x - xc) ** 2))

    rng = np.random.default_rng(config.seed)
    lam = config.lam or 4 + int(3 * math.log(n))
    mu = config.mu or lam // 2
    w = math.log(mu + 0.5) - np.log(np.arange(1, mu + 1))
    w /= w.sum()
    mueff = 1.0 / np.sum(w**2)

    cc = (4 + mueff / n) / (n + 4 + 2 * mueff / n)
    cs = (mueff + 2) / (n + mueff + 5)
    c1 = 2 / ((n + 1.3) ** 2 + mueff)
    cmu = min(1 - c1, 2 * (mueff - 2 + 1 / mueff) / ((n + 2) ** 2 + mueff))
    damps = 1 + 2 * max(0.0, math.sqrt((mueff - 1) / (n + 1)) - 1) + cs
    chi_n = math.sqrt(n) * (1 - 1 / (4 * n) + 1 / (21 * n * n))

    sigma = config.sigma0
    pc = np.zeros(n)
    ps = np.zeros(n)
    C = np.eye(n)
    B = np.eye(n)
    D = np.ones(n)

    f0 = objective(m)
    nfev = 1
    best_x, best_f = m.copy(), f0 if math.isfinite(f0) else math.inf
    history: list[float] = []
    trace = [(nfev, best_f)]
    min_eig = []
    asymmetry = []
    stop = "max_evals"
    gen = 0
    while nfev + lam <= config.max_evals:
        gen += 1
        z = rng.standard_normal((lam, n))
        y = (z * D) @ B.T
        xs = m + sigma * y
        fs = np.array([objective(x) for x in xs])
        nfev += lam
        fs_rank = np.where(np.isfinite(fs), fs, np.inf)
        order = np.argsort(fs_rank, kind="stable")
        if fs_rank[order[0]] < best_f:
            best_f = float(fs_rank[order[0]])
            best_x = xs[order[0]].copy()

        y_sel = y[order[:mu]]
        y_w = w @ y_sel
        m = m + sigma * y_w

        c_inv_sqrt_y = B @ ((B.T @ y_w) / D)
        ps = (1 - cs) * ps + math.sqrt(cs * (2 - cs) * mueff) * c_inv_sqrt_y
        hsig = np.linalg.norm(ps) / math.sqrt(1 - (1 - cs) ** (2 * gen)) / chi_n < 1.4 + 2 / (n + 1)
        pc = (1 - cc) * pc + hsig * math.sqrt(cc * (2 - cc) * mueff) * y_w

        rank_mu = (y_sel.T * w) @ y_sel
        C = (
            (1 - c1 - cmu) * C
            + c1 * (np.outer(pc, pc) + (1 - hsig) * cc * (2 - cc) * C)
            + cmu * rank_mu
        )
        asymmetry.append(float(np.abs(C - C.T).max()))
        C = 0.5 * (C + C.T)
        sigma *= math.exp((cs / damps) * (np.linalg.norm(ps) / chi_n - 1))

        eigvals, B = np.linalg.eigh(C)
        min_eig.append(float(eigvals.min()))
        if eigvals.min() <= 0:
            stop = "covariance_not_positive"
            break
        D = np.sqrt(eigvals)

        history.append(float(fs_rank[order[0]]))
        trace.append((nfev, best_f))
        if callback is not None:
            callback(best_x, best_f, sigma)

        window = 10 + int(math.ceil(30 * n / lam))
        recent = history[-window:]
        if len(history) >= window and np.all(np.isfinite(fs_rank)):
            spread = max(max(recent), fs_rank.max()) - min(min(recent), fs_rank.min())
            if spread < config.tol_f:
                stop = "tol_f"
                break
        if eigvals.max() / eigvals.min() > config.max_condition:
            stop = "condition"
            break

    if lower is not None:
        best_x = _clip(best_x, lower, upper)
    info = {"generations": gen, "sigma": sigma, "stop": stop, "lambda": lam, "mu": mu,
            "min_eigenvalue": min_eig, "asymmetry": asymmetry}
    return SolverResult(best_x, best_f, nfev, trace, info)
