"""Scheme registry: one entry point for all eight schedulers.

Every scheme resolves parameter overrides against its own dataclass, runs
on an owned deterministic stream derived from the given seed, and comes
back as a :class:`SchedulerResult` whose objective equals the core
evaluation of the returned assignment.
"""
from __future__ import annotations

import dataclasses
import time
from typing import Any, Callable, Mapping

from .core import Assignment, NEG_INF, SlotInstance
from .exact import QuantizationSpec, solve_dp, solve_naive_memo
from .heuristics import (
    AcoParams,
    Nsga2Params,
    PsoParams,
    run_aco,
    run_ga_cr,
    run_ga_gp,
    run_nsga2,
    run_pso,
)
from .lgsto import LgstoParams, run_lgsto
from .result import SchedulerResult


class UnknownSchemeError(ValueError):
    def __init__(self, name: str):
        super().__init__(f"unknown scheme {name!r}; valid schemes: {', '.join(SCHEME_NAMES)}")
        self.scheme = name


def _build_params(cls, seed: int, overrides: Mapping[str, Any]):
    fields = {f.name for f in dataclasses.fields(cls)}
    unknown = set(overrides) - fields
    if unknown:
        raise ValueError(
            f"unknown parameter(s) for {cls.__name__}: {', '.join(sorted(unknown))}"
        )
    merged = dict(overrides)
    merged.setdefault("seed", seed)
    return cls(**merged)


def _exact_runner(solver: Callable) -> Callable:
    def run(instance: SlotInstance, seed: int, overrides: Mapping[str, Any]) -> SchedulerResult:
        opts = dict(overrides)
        quant = QuantizationSpec(
            time_quantum=opts.pop("time_quantum", 1.0),
            energy_quantum=opts.pop("energy_quantum", 0.1),
        )
        cap = opts.pop("memory_cap_mb", None)
        opts.pop("seed", None)  # exact solvers are deterministic, seed is irrelevant
        if opts:
            raise ValueError(f"unknown parameter(s): {', '.join(sorted(opts))}")
        kwargs = {}
        if cap is not None:
            kwargs["memory_cap_bytes"] = int(cap * 1024 * 1024)
        start = time.perf_counter()
        solution = solver(instance, quant, **kwargs)
        elapsed_ms = (time.perf_counter() - start) * 1000.0
        name = "naive" if solver is solve_naive_memo else "dp"
        if solution is None:
            return SchedulerResult(
                scheme=name,
                assignment=Assignment(()),
                objective=NEG_INF,
                feasible=False,
                scheduling_time_ms=elapsed_ms,
            )
        return SchedulerResult(
            scheme=name,
            assignment=solution.assignment,
            objective=solution.objective,
            feasible=True,
            scheduling_time_ms=elapsed_ms,
        )

    return run


def _evolution_runner(fn: Callable) -> Callable:
    def run(instance: SlotInstance, seed: int, overrides: Mapping[str, Any]) -> SchedulerResult:
        return fn(instance, _build_params(LgstoParams, seed, overrides))

    return run


def _nsga2_runner(instance: SlotInstance, seed: int, overrides: Mapping[str, Any]) -> SchedulerResult:
    return run_nsga2(instance, _build_params(Nsga2Params, seed, overrides))


def _pso_runner(instance: SlotInstance, seed: int, overrides: Mapping[str, Any]) -> SchedulerResult:
    return run_pso(instance, _build_params(PsoParams, seed, overrides))


def _aco_runner(instance: SlotInstance, seed: int, overrides: Mapping[str, Any]) -> SchedulerResult:
    return run_aco(instance, _build_params(AcoParams, seed, overrides))


_RUNNERS: dict[str, Callable] = {
    "naive": _exact_runner(solve_naive_memo),
    "dp": _exact_runner(solve_dp),
    "lgsto": _evolution_runner(run_lgsto),
    "ga-gp": _evolution_runner(run_ga_gp),
    "ga-cr": _evolution_runner(run_ga_cr),
    "nsga2": _nsga2_runner,
    "pso": _pso_runner,
    "aco": _aco_runner,
}

SCHEME_NAMES = tuple(_RUNNERS)


def solve(
    scheme: str,
    instance: SlotInstance,
    seed: int = 0,
    overrides: Mapping[str, Any] | None = None,
) -> SchedulerResult:
    """Run one scheme on one instance with optional parameter overrides."""
    runner = _RUNNERS.get(scheme)
    if runner is None:
        raise UnknownSchemeError(scheme)
    return runner(instance, seed, overrides or {})
