"""Adaptive simulated annealing with per-coordinate step control.

Each evaluation perturbs one coordinate (cycling through them) by a uniform
draw in [-s_k, s_k]; every ``reanneal_interval`` evaluations each s_k is
scaled by its acceptance rate over the target rate, so every variable keeps
roughly as many accepted as rejected moves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

T_STOP = 1e-8


@dataclass(frozen=True)
class AsaConfig:
    T0: float | None = None  # None: estimated from random moves around x0
    cooling: float | None = None  # None: reach 1e-6 * T0 as the budget runs out
    steps_per_temp: int | None = None  # None: 10 sweeps over the coordinates
    reanneal_interval: int | None = None  # None: 5 sweeps
    target_accept: float = 0.5
    step_sizes: Sequence[float] | None = None  # None: 10% of each bounded range
    seed: int = 0
    max_evals: int = 10_000
    restart_from_best: bool = True

    def __post_init__(self):
        if self.cooling is not None and not 0.0 < self.cooling < 1.0:
            raise ValueError("cooling must lie in (0, 1)")
        if not 0.0 < self.target_accept < 1.0:
            raise ValueError("target_accept must lie in (0, 1)")
        if self.max_evals < 1:
            raise ValueError("max_evals must be positive")


@dataclass
class SolverResult:
    x: np.ndarray
    fun: float
    nfev: int
    trace: list = field(default_factory=list)  # (nfev, best f) per temperature level / generation
    info: dict = field(default_factory=dict)


def _clip(x, lower, upper):
    return np.minimum(np.maximum(x, lower), upper)


def asa_minimize(
    f: Callable[[np.ndarray], float],
    x0,
    bounds=None,
    config: AsaConfig = AsaConfig(),
    callback: Callable | None = None,
) -> SolverResult:
    """Minimize ``f`` from ``x0`` inside box ``bounds`` (pair of arrays, or None)."""
    x = np.array(x0, dtype=float)
    n = x.size
    if bounds is None:
        lower, upper = np.full(n, -np.inf), np.full(n, np.inf)
    else:
        lower = np.asarray(bounds[0], dtype=float) * np.ones(n)
        upper = np.asarray(bounds[1], dtype=float) * np.ones(n)
    x = _clip(x, lower, upper)
    rng = np.random.default_rng(config.seed)

    fx = float(f(x))
    if not math.isfinite(fx):
        raise ValueError("objective is not finite at the starting point")
    nfev = 1
    best_x, best_f = x.copy(), fx

    span = upper - lower
    if config.step_sizes is not None:
        steps = np.asarray(config.step_sizes, dtype=float) * np.ones(n)
    else:
        steps = np.where(np.isfinite(span), 0.1 * span, 1.0)
    max_step = np.where(np.isfinite(span), span, np.inf)
    min_step = 1e-12 * np.maximum(1.0, np.where(np.isfinite(span), span, 1.0))

    steps_per_temp = config.steps_per_temp or 10 * n
    interval = config.reanneal_interval or 5 * n

    T0 = config.T0
    if T0 is None:
        # mean uphill change of a few random moves, for ~80% initial uphill acceptance
        ups = []
        for k in range(min(4 * n, 40)):
            y = x.copy()
            y[k % n] += rng.uniform(-steps[k % n], steps[k % n])
            fy = float(f(_clip(y, lower, upper)))
            nfev += 1
            if math.isfinite(fy) and fy != fx:
                ups.append(abs(fy - fx))
            if math.isfinite(fy) and fy < best_f:
                best_f, best_x = fy, _clip(y, lower, upper)
        T0 = -np.mean(ups) / math.log(0.8) if ups else 1.0
    if not T0 > 0:
        raise ValueError("T0 must be positive")
    cooling = config.cooling
    if cooling is None:
        levels = max(1.0, (config.max_evals - nfev) / steps_per_temp)
        cooling = min(math.exp(math.log(1e-6) / levels), 0.999)

    tried = np.zeros(n, dtype=int)
    accepted = np.zeros(n, dtype=int)
    downhill = downhill_accepted = total_accepted = proposals = 0
    trace = [(nfev, best_f)]
    T = T0
    k = 0
    while nfev < config.max_evals and T >= T_STOP * T0:
        for _ in range(steps_per_temp):
            if nfev >= config.max_evals:
                break
            y = x.copy()
            y[k] += rng.uniform(-steps[k], steps[k])
            y = _clip(y, lower, upper)
            fy = float(f(y))
            nfev += 1
            proposals += 1
            tried[k] += 1
            delta = fy - fx if math.isfinite(fy) else math.inf
            if delta <= 0.0:
                downhill += 1
                accept = True
            else:
                accept = rng.random() < math.exp(-delta / T)
            if accept:
                if delta <= 0.0:
                    downhill_accepted += 1
                accepted[k] += 1
                total_accepted += 1
                x, fx = y, fy
                if fx < best_f:
                    best_x, best_f = x.copy(), fx
            if proposals % interval == 0:
                rate = accepted / np.maximum(tried, 1)
                steps = steps * np.clip(rate / config.target_accept, 0.5, 2.0)
                steps = np.clip(steps, min_step, max_step)
                tried[:] = 0
                accepted[:] = 0
            k = (k + 1) % n
        if config.restart_from_best and fx > best_f:
            x, fx = best_x.copy(), best_f
        trace.append((nfev, best_f))
        if callback is not None:
            callback(best_x, best_f, T)
        T *= cooling

    info = {
        "T0": T0,
        "cooling": cooling,
        "final_T": T,
        "proposals": proposals,
        "accepted": total_accepted,
        "downhill": downhill,
        "downhill_accepted": downhill_accepted,
        "step_sizes": steps.tolist(),
    }
    return SolverResult(best_x, best_f, nfev, trace, info)
