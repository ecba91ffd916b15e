"""Constraint-dominated NSGA-II comparator.

Three objectives per assignment: maximise the accuracy sum, minimise the
total time and minimise the total energy.  Domination uses the standard
constrained rule: any budget-respecting solution beats any violator, and
two violators are ordered by total violation magnitude.  The reported
answer is the feasible member of the final population with the highest
accuracy sum.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..core import (
    Assignment,
    ContractViolation,
    NEG_INF,
    SlotInstance,
    evaluate,
)
from ..lgsto import crossover_duc, mutate, random_assignment
from ..result import SchedulerResult
from ..rng import seeded_rng


@dataclass(frozen=True)
class Nsga2Params:
    population_size: int = 100
    max_generations: int = 10
    mutation_probability: float = 0.3
    seed: int = 0

    def __post_init__(self) -> None:
        if self.population_size < 2:
            raise ContractViolation("population_size must be at least 2")
        if self.max_generations < 1:
            raise ContractViolation("max_generations must be at least 1")
        if not 0.0 <= self.mutation_probability <= 1.0:
            raise ContractViolation("mutation_probability must lie in [0, 1]")


def _objectives(members: list[Assignment], instance: SlotInstance):
    """Minimisation objectives (-accuracy, time, energy) plus violations."""
    n = len(members)
    obj = np.empty((n, 3))
    violation = np.empty(n)
    tb = instance.constraints.time_budget_ms
    eb = instance.constraints.energy_budget
    for idx, member in enumerate(members):
        ev = evaluate(member, instance)
        t = ev.total_time
        e = ev.total_energy
        acc = ev.fitness if ev.feasible else sum(
            instance.costs().accuracy[g - 1] for g in member.genes
        )
        obj[idx] = (-acc, t, e)
        violation[idx] = max(0.0, t - tb) + max(0.0, e - eb)
    return obj, violation


def constrained_dominates(
    obj_p: np.ndarray, cv_p: float, obj_q: np.ndarray, cv_q: float
) -> bool:
    """Deb's constrained domination on minimisation objectives."""
    if cv_p == 0.0 and cv_q > 0.0:
        return True
    if cv_p > 0.0 and cv_q == 0.0:
        return False
    if cv_p > 0.0 and cv_q > 0.0:
        return cv_p < cv_q
    return bool(np.all(obj_p <= obj_q) and np.any(obj_p < obj_q))


def _domination_matrix(obj: np.ndarray, cv: np.ndarray) -> np.ndarray:
    """dom[p, q] is True when member p constrained-dominates member q."""
    feas = cv == 0.0
    less_eq = (obj[:, None, :] <= obj[None, :, :]).all(axis=2)
    less = (obj[:, None, :] < obj[None, :, :]).any(axis=2)
    pareto = less_eq & less
    both_feasible = feas[:, None] & feas[None, :]
    p_only = feas[:, None] & ~feas[None, :]
    both_violate = ~feas[:, None] & ~feas[None, :]
    smaller_cv = cv[:, None] < cv[None, :]
    return (both_feasible & pareto) | p_only | (both_violate & smaller_cv)


def fast_non_dominated_sort(obj: np.ndarray, cv: np.ndarray) -> list[np.ndarray]:
    dom = _domination_matrix(obj, cv)
    dominated_count = dom.sum(axis=0).astype(np.int64)
    fronts = []
    remaining = np.ones(len(cv), dtype=bool)
    while remaining.any():
        current = remaining & (dominated_count == 0)
        if not current.any():  # pragma: no cover - domination is acyclic
            current = remaining.copy()
        fronts.append(np.flatnonzero(current))
        remaining &= ~current
        dominated_count -= dom[current].sum(axis=0)
    return fronts


def crowding_distance(obj: np.ndarray, front: np.ndarray) -> np.ndarray:
    size = len(front)
    distance = np.zeros(size)
    if size <= 2:
        return np.full(size, np.inf)
    for col in range(obj.shape[1]):
        values = obj[front, col]
        order = np.argsort(values, kind="stable")
        spread = values[order[-1]] - values[order[0]]
        distance[order[0]] = np.inf
        distance[order[-1]] = np.inf
        if spread > 0.0:
            gaps = (values[order[2:]] - values[order[:-2]]) / spread
            distance[order[1:-1]] += gaps
    return distance


def run_nsga2(instance: SlotInstance, params: Nsga2Params | None = None) -> SchedulerResult:
    params = params or Nsga2Params()
    start = time.perf_counter()
    rng = seeded_rng(params.seed)
    size = params.population_size

    population = [random_assignment(instance, rng) for _ in range(size)]

    for _ in range(params.max_generations):
        obj, cv = _objectives(population, instance)
        fronts = fast_non_dominated_sort(obj, cv)
        rank = np.empty(len(population), dtype=np.int64)
        crowd = np.empty(len(population))
        for front_idx, front in enumerate(fronts):
            rank[front] = front_idx
            crowd[front] = crowding_distance(obj, front)

        def pick() -> Assignment:
            a = rng.randint(0, size - 1)
            b = rng.randint(0, size - 1)
            if rank[a] != rank[b]:
                return population[a if rank[a] < rank[b] else b]
            if crowd[a] != crowd[b]:
                return population[a if crowd[a] > crowd[b] else b]
            return population[a]

        offspring: list[Assignment] = []
        while len(offspring) < size:
            o1, o2 = crossover_duc(pick(), pick(), rng)
            o1 = mutate(o1, params.mutation_probability, instance, rng)
            o2 = mutate(o2, params.mutation_probability, instance, rng)
            offspring.append(o1)
            if len(offspring) < size:
                offspring.append(o2)

        combined = population + offspring
        obj_c, cv_c = _objectives(combined, instance)
        fronts_c = fast_non_dominated_sort(obj_c, cv_c)
        chosen: list[int] = []
        for front in fronts_c:
            if len(chosen) + len(front) <= size:
                chosen.extend(front.tolist())
            else:
                crowd_front = crowding_distance(obj_c, front)
                order = np.argsort(-crowd_front, kind="stable")
                chosen.extend(front[order[: size - len(chosen)]].tolist())
                break
        population = [combined[i] for i in chosen]

    evaluated = [evaluate(member, instance) for member in population]
    feasible = [ev for ev in evaluated if ev.feasible]
    elapsed_ms = (time.perf_counter() - start) * 1000.0
    if not feasible:
        best = min(evaluated, key=lambda ev: ev.rank_key)
        return SchedulerResult(
            scheme="nsga2",
            assignment=best.assignment,
            objective=NEG_INF,
            feasible=False,
            scheduling_time_ms=elapsed_ms,
            generations=params.max_generations,
        )
    winner = min(feasible, key=lambda ev: ev.rank_key)
    return SchedulerResult(
        scheme="nsga2",
        assignment=winner.assignment,
        objective=winner.fitness,
        feasible=True,
        scheduling_time_ms=elapsed_ms,
        generations=params.max_generations,
    )
