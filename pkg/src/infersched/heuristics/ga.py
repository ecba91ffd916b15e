"""Plain genetic comparators: gene-pool and 1-point-crossover reproduction.

Both reuse the lgsto engine (ranking, fading mutation, feasibility gating,
random refill) and differ in how offspring are produced.  As classic
generational GAs they run their whole generation budget, replace the
population wholesale and do not walk the incumbent's neighborhood; the
stable-best early stop and the walk are the hybrid scheme's additions.
The returned answer is the best assignment seen across all generations.
"""
from __future__ import annotations

import numpy as np

from ..core import SlotInstance
from ..lgsto import (
    LgstoParams,
    TrancheProducer,
    _apply_mutation,
    _tournament_winners,
    evolve,
)
from ..result import SchedulerResult
from ..rng import SubtractiveRandom


def _gene_pool_tranche_factory(
    instance: SlotInstance, genes_matrix: np.ndarray, params: LgstoParams, rng: SubtractiveRandom
) -> TrancheProducer:
    # The matrix rows are ranked best-first, so the fitter half is a prefix.
    # Pool j is that prefix's column j; every offspring gene is drawn from
    # its position's pool independently.
    n = instance.job_count
    k = instance.model_count
    top = genes_matrix[: max(1, len(genes_matrix) // 2)]
    cols = np.arange(n)

    def make(need: int, mutation_prob: float, attempts_left: int) -> tuple[np.ndarray, int]:
        count = max(1, min(need, attempts_left))
        picks = (rng.take_array(count * n).reshape(count, n) * len(top)).astype(np.int64)
        out = top[picks, cols[None, :]]
        _apply_mutation(out, mutation_prob, k, rng)
        return out, count

    return make


def _one_point_tranche_factory(
    instance: SlotInstance, genes_matrix: np.ndarray, params: LgstoParams, rng: SubtractiveRandom
) -> TrancheProducer:
    n = instance.job_count
    k = instance.model_count
    p = len(genes_matrix)
    cols = np.arange(n)

    def make(need: int, mutation_prob: float, attempts_left: int) -> tuple[np.ndarray, int]:
        pairs = max(1, min((need + 1) // 2, attempts_left))
        winners = _tournament_winners(pairs, p, params, rng)
        pa = genes_matrix[winners[:, 0]]
        pb = genes_matrix[winners[:, 1]]
        if n < 2:
            out = np.empty((2 * pairs, n), dtype=np.int64)
            out[0::2] = pa
            out[1::2] = pb
        else:
            cuts = (rng.take_array(pairs) * (n - 1)).astype(np.int64) + 1
            mask = cols[None, :] < cuts[:, None]
            out = np.empty((2 * pairs, n), dtype=np.int64)
            out[0::2] = np.where(mask, pa, pb)
            out[1::2] = np.where(mask, pb, pa)
        _apply_mutation(out, mutation_prob, k, rng)
        return out, pairs

    return make


def run_ga_gp(instance: SlotInstance, params: LgstoParams | None = None) -> SchedulerResult:
    """Genetic algorithm drawing each offspring gene from a per-position pool."""
    return evolve(
        instance,
        params or LgstoParams(),
        "ga-gp",
        _gene_pool_tranche_factory,
        explore=False,
        elitist=False,
        early_stop=False,
    )


def run_ga_cr(instance: SlotInstance, params: LgstoParams | None = None) -> SchedulerResult:
    """Genetic algorithm with tournament parents and single-cut crossover."""
    return evolve(
        instance,
        params or LgstoParams(),
        "ga-cr",
        _one_point_tranche_factory,
        explore=False,
        elitist=False,
        early_stop=False,
    )
