"""Ant colony comparator over the (job, model) assignment graph.

Pheromone lives on job-model pairs.  The static heuristic favours models
with high accuracy per unit of budget-normalised cost, which keeps the
time and energy dimensions commensurate.  Each iteration every ant samples
one model per job from the pheromone-weighted distribution, the trails
evaporate, and the iteration's best feasible ant reinforces its choices in
proportion to how close it came to the best schedule seen so far.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..core import Assignment, ContractViolation, NEG_INF, SlotInstance, evaluate, evaluate_batch
from ..result import SchedulerResult
from ..rng import derive_seed

_HEURISTIC_EPS = 1e-6


@dataclass(frozen=True)
class AcoParams:
    ant_count: int = 200
    max_iterations: int = 50
    evaporation: float = 0.1
    alpha: float = 1.0
    beta: float = 2.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.ant_count < 1:
            raise ContractViolation("ant_count must be at least 1")
        if self.max_iterations < 1:
            raise ContractViolation("max_iterations must be at least 1")
        if not 0.0 < self.evaporation < 1.0:
            raise ContractViolation("evaporation must lie strictly between 0 and 1")


def heuristic_matrix(instance: SlotInstance) -> np.ndarray:
    """Static desirability of model i for job j: accuracy over scaled cost."""
    t, e, acc = instance.costs().arrays()
    tb = instance.constraints.time_budget_ms
    eb = instance.constraints.energy_budget
    return acc[None, :] / (t / tb + e / eb + _HEURISTIC_EPS)


def run_aco(instance: SlotInstance, params: AcoParams | None = None) -> SchedulerResult:
    params = params or AcoParams()
    start = time.perf_counter()
    rng = np.random.Generator(np.random.PCG64(derive_seed(params.seed, "aco")))
    n = instance.job_count
    k = instance.model_count
    ants = params.ant_count

    pheromone = np.ones((n, k))
    eta_beta = heuristic_matrix(instance) ** params.beta

    best_genes: np.ndarray | None = None
    best_objective = NEG_INF
    fallback_genes: np.ndarray | None = None

    for _ in range(params.max_iterations):
        weights = (pheromone ** params.alpha) * eta_beta
        cumulative = np.cumsum(weights, axis=1)
        totals = cumulative[:, -1]
        draws = rng.random((ants, n)) * totals[None, :]
        genes = np.empty((ants, n), dtype=np.int64)
        for j in range(n):
            genes[:, j] = np.searchsorted(cumulative[j], draws[:, j], side="right") + 1
        np.clip(genes, 1, k, out=genes)

        fitness, _, _ = evaluate_batch(genes, instance)
        iter_best = int(np.argmax(fitness))
        iter_fit = float(fitness[iter_best])
        fallback_genes = genes[iter_best]

        pheromone *= 1.0 - params.evaporation
        if iter_fit > NEG_INF:
            if iter_fit > best_objective:
                best_objective = iter_fit
                best_genes = genes[iter_best].copy()
            deposit = iter_fit / best_objective
            pheromone[np.arange(n), genes[iter_best] - 1] += deposit

    elapsed_ms = (time.perf_counter() - start) * 1000.0
    chosen = best_genes if best_genes is not None else fallback_genes
    final = evaluate(Assignment(tuple(int(g) for g in chosen)), instance)
    return SchedulerResult(
        scheme="aco",
        assignment=final.assignment,
        objective=final.fitness,
        feasible=final.fitness > NEG_INF,
        scheduling_time_ms=elapsed_ms,
        generations=params.max_iterations,
    )
