from .asa import AsaConfig, SolverResult, asa_minimize
from .cma import CmaConfig, cma_minimize
from .hierarchy import OptimizeConfig, optimize_scene, solve

__all__ = ["AsaConfig", "CmaConfig", "OptimizeConfig", "SolverResult", "asa_minimize",
           "cma_minimize", "optimize_scene", "solve"]
