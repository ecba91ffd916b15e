"""Particle swarm comparator with round-and-clamp integer decoding.

Particles move through a continuous n-dimensional space; a position
decodes to an assignment by rounding each coordinate and clamping it into
the catalog index range.  Personal and global bests are ranked by the core
fitness, so budget violators score the sentinel and can never become the
reported answer while a feasible particle exists.

The swarm is large (thousands of particles), so the update loop runs on
numpy arrays; the numpy generator is seeded from the run seed and the
stream is reproducible for a given numpy version.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..core import Assignment, ContractViolation, NEG_INF, SlotInstance, evaluate, evaluate_batch
from ..result import SchedulerResult
from ..rng import derive_seed


@dataclass(frozen=True)
class PsoParams:
    swarm_size: int = 2000
    max_iterations: int = 30
    inertia: float = 0.7
    cognitive: float = 1.5
    social: float = 1.5
    velocity_clamp: float | None = None  # optional |v| cap, off by default
    seed: int = 0

    def __post_init__(self) -> None:
        if self.swarm_size < 1:
            raise ContractViolation("swarm_size must be at least 1")
        if self.max_iterations < 1:
            raise ContractViolation("max_iterations must be at least 1")
        if self.velocity_clamp is not None and self.velocity_clamp <= 0.0:
            raise ContractViolation("velocity_clamp must be positive when set")


def decode_positions(positions: np.ndarray, model_count: int) -> np.ndarray:
    """Round each coordinate and clamp into the 1..model_count gene range."""
    return np.clip(np.rint(positions), 1, model_count).astype(np.int64)


def run_pso(instance: SlotInstance, params: PsoParams | None = None) -> SchedulerResult:
    params = params or PsoParams()
    start = time.perf_counter()
    rng = np.random.Generator(np.random.PCG64(derive_seed(params.seed, "pso")))
    n = instance.job_count
    k = instance.model_count
    swarm = params.swarm_size

    positions = rng.integers(1, k + 1, size=(swarm, n)).astype(np.float64)
    velocities = rng.choice(np.array([1.0, -1.0]), size=(swarm, n))

    genes = decode_positions(positions, k)
    fitness, _, _ = evaluate_batch(genes, instance)
    pbest_pos = positions.copy()
    pbest_fit = fitness.copy()
    gbest_idx = int(np.argmax(pbest_fit))
    gbest_pos = pbest_pos[gbest_idx].copy()
    gbest_fit = float(pbest_fit[gbest_idx])
    gbest_genes = genes[gbest_idx].copy()

    for _ in range(params.max_iterations):
        u1 = rng.random((swarm, n))
        u2 = rng.random((swarm, n))
        velocities = (
            params.inertia * velocities
            + params.cognitive * u1 * (pbest_pos - positions)
            + params.social * u2 * (gbest_pos - positions)
        )
        if params.velocity_clamp is not None:
            np.clip(velocities, -params.velocity_clamp, params.velocity_clamp, out=velocities)
        positions = positions + velocities

        genes = decode_positions(positions, k)
        fitness, _, _ = evaluate_batch(genes, instance)
        improved = fitness > pbest_fit
        pbest_fit = np.where(improved, fitness, pbest_fit)
        pbest_pos[improved] = positions[improved]
        best_idx = int(np.argmax(pbest_fit))
        if pbest_fit[best_idx] > gbest_fit:
            gbest_fit = float(pbest_fit[best_idx])
            gbest_pos = pbest_pos[best_idx].copy()
            gbest_genes = decode_positions(gbest_pos[None, :], k)[0]

    elapsed_ms = (time.perf_counter() - start) * 1000.0
    final = evaluate(Assignment(tuple(int(g) for g in gbest_genes)), instance)
    return SchedulerResult(
        scheme="pso",
        assignment=final.assignment,
        objective=final.fitness,
        feasible=final.fitness > NEG_INF,
        scheduling_time_ms=elapsed_ms,
        generations=params.max_iterations,
    )
