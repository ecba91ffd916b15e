"""Selective inference-task offloading: schedulers and a slot simulator.

Each job in a time slot is assigned to one local model profile or offloaded
to the remote profile so that the summed average accuracy is maximised
under per-slot time and energy budgets.  Eight schemes share one solve
interface: two exact solvers over quantized budgets, the hybrid genetic
scheduler lgsto, and five comparator metaheuristics.
"""
from .core import (
    Assignment,
    ChannelModel,
    ConstraintPair,
    ContractViolation,
    EvaluatedAssignment,
    JobSpec,
    Locality,
    ModelProfile,
    NEG_INF,
    SlotInstance,
    evaluate,
    evaluate_batch,
    job_energy,
    job_time,
    offload_energy,
    offload_time,
)
from .exact import ExactSolution, MemoryCapExceeded, QuantizationSpec, solve_dp, solve_naive_memo
from .lgsto import LgstoParams, run_lgsto
from .result import SchedulerResult
from .rng import SubtractiveRandom, derive_seed, seeded_rng
from .schedulers import SCHEME_NAMES, UnknownSchemeError, solve

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "ChannelModel",
    "ConstraintPair",
    "ContractViolation",
    "EvaluatedAssignment",
    "ExactSolution",
    "JobSpec",
    "LgstoParams",
    "Locality",
    "MemoryCapExceeded",
    "ModelProfile",
    "NEG_INF",
    "QuantizationSpec",
    "SCHEME_NAMES",
    "SchedulerResult",
    "SlotInstance",
    "SubtractiveRandom",
    "UnknownSchemeError",
    "derive_seed",
    "evaluate",
    "evaluate_batch",
    "job_energy",
    "job_time",
    "offload_energy",
    "offload_time",
    "seeded_rng",
    "solve",
    "solve_dp",
    "solve_naive_memo",
    "run_lgsto",
    "__version__",
]
