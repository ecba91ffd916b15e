"""Comparator metaheuristics behind the common scheduler interface."""
from .aco import AcoParams, run_aco
from .ga import run_ga_cr, run_ga_gp
from .nsga2 import Nsga2Params, run_nsga2
from .pso import PsoParams, run_pso

__all__ = [
    "AcoParams",
    "Nsga2Params",
    "PsoParams",
    "run_aco",
    "run_ga_cr",
    "run_ga_gp",
    "run_nsga2",
    "run_pso",
]
