"""The two derivative-free solvers on standard benchmarks.

Run: python demos/03_solvers.py
"""

import numpy as np

from colayout import AsaConfig, CmaConfig, asa_minimize, cma_minimize


def rastrigin(x):
    x = np.asarray(x)
    return float(10 * x.size + np.sum(x * x - 10 * np.cos(2 * np.pi * x)))


def rosenbrock(x):
    x = np.asarray(x)
    return float(np.sum(100 * (x[1:] - x[:-1] ** 2) ** 2 + (1 - x[:-1]) ** 2))


bounds = (np.full(2, -5.12), np.full(2, 5.12))
for seed in range(3):
    r = asa_minimize(rastrigin, [3.3, -4.1], bounds, AsaConfig(seed=seed, max_evals=50_000))
    print(f"ASA rastrigin seed {seed}: f = {r.fun:.2e} after {r.nfev} evals, x = {np.round(r.x, 4)}")

r = cma_minimize(rosenbrock, np.zeros(5), CmaConfig(seed=0, max_evals=20_000))
print(f"CMA-ES rosenbrock: f = {r.fun:.2e} after {r.nfev} evals")
print(f"smallest covariance eigenvalue seen: {min(r.info['min_eigenvalue']):.2e}")
