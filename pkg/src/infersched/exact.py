"""Ground-truth solvers over quantized budgets.

Both solvers optimise the same discretised problem: per-job costs are
rounded up to whole quanta, budgets are rounded down, and every job picks
exactly one model.  Round-up quantization is conservative, so any schedule
that fits the bucketed budgets also fits the true budgets.

``solve_naive_memo`` is a memoized exhaustive recursion over
(job, remaining time buckets, remaining energy buckets); it only ever
visits reachable states.  ``solve_dp`` fills dense per-job suffix tables
bottom-up, so its runtime scales with the full budget grid.  The two
return identical objectives and, because both apply the same ranking
tie-break (fitness, then total time, total energy, then lexicographic
genes), identical assignments.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass

import numpy as np

from .core import Assignment, ContractViolation, SlotInstance, evaluate

DEFAULT_MEMORY_CAP_BYTES = 512 * 1024 * 1024

# Coarse per-entry cost estimates for the memo dict, used by the cap check.
_MEMO_BOUND_BYTES = 64
_MEMO_LIVE_BYTES = 250
_LIVE_CHECK_EVERY = 65536


class MemoryCapExceeded(RuntimeError):
    """Solving would need more memory than the configured cap."""

    def __init__(self, required_bytes: int, cap_bytes: int):
        super().__init__(
            f"requires about {required_bytes / 1e6:.0f} MB, cap is {cap_bytes / 1e6:.0f} MB"
        )
        self.required_bytes = required_bytes
        self.cap_bytes = cap_bytes


@dataclass(frozen=True)
class QuantizationSpec:
    """Bucket widths for the discretised budgets."""

    time_quantum: float = 1.0
    energy_quantum: float = 0.1

    def __post_init__(self) -> None:
        if not (self.time_quantum > 0.0 and math.isfinite(self.time_quantum)):
            raise ContractViolation("time_quantum must be positive and finite")
        if not (self.energy_quantum > 0.0 and math.isfinite(self.energy_quantum)):
            raise ContractViolation("energy_quantum must be positive and finite")


@dataclass(frozen=True)
class ExactSolution:
    assignment: Assignment
    objective: float
    optimal_under_quantization: bool = True


def quantize_cost(cost: float, quantum: float) -> int:
    """Bucket count for one cost: ceil(cost / quantum), never rounding down.

    Rounding up keeps quantized feasibility conservative: a schedule whose
    bucket sums fit the bucketed budgets always fits the true budgets.
    """
    if cost < 0.0:
        raise ContractViolation(f"cost must be non-negative, got {cost}")
    if quantum <= 0.0:
        raise ContractViolation(f"quantum must be positive, got {quantum}")
    return int(math.ceil(cost / quantum))


def budget_buckets(budget: float, quantum: float) -> int:
    """Bucket capacity for one budget: floor with a tiny tolerance.

    The 1e-9 slack absorbs float division noise when the budget is an
    exact multiple of the quantum.
    """
    return int(math.floor(budget / quantum + 1e-9))


def _tables(instance: SlotInstance, quant: QuantizationSpec):
    costs = instance.costs()
    n = instance.job_count
    k = instance.model_count
    ct = costs.time_ms
    ce = costs.energy
    qt = quant.time_quantum
    qe = quant.energy_quantum
    bt = [[quantize_cost(ct[j][i], qt) for i in range(k)] for j in range(n)]
    be = [[quantize_cost(ce[j][i], qe) for i in range(k)] for j in range(n)]
    return bt, be, ct, ce, costs.accuracy


def _prefer(cand: tuple, best: tuple) -> bool:
    """Ranking rule on (value, time, energy, genes): higher value first,
    then lower time, lower energy, lexicographically smaller genes."""
    if cand[0] != best[0]:
        return cand[0] > best[0]
    if cand[1] != best[1]:
        return cand[1] < best[1]
    if cand[2] != best[2]:
        return cand[2] < best[2]
    return cand[3] < best[3]


def solve_naive_memo(
    instance: SlotInstance,
    quant: QuantizationSpec | None = None,
    memory_cap_bytes: int = DEFAULT_MEMORY_CAP_BYTES,
) -> ExactSolution | None:
    """Exhaustive search with memoization on the remaining-budget state.

    Returns ``None`` when no assignment fits the bucketed budgets.  Raises
    :class:`MemoryCapExceeded` if the state space bound (or the live memo)
    would outgrow the cap.  Worst-case time is O(models x time buckets x
    energy buckets x jobs), but only reachable states are materialised.
    """
    quant = quant or QuantizationSpec()
    n = instance.job_count
    k = instance.model_count
    budget_t = budget_buckets(instance.constraints.time_budget_ms, quant.time_quantum)
    budget_e = budget_buckets(instance.constraints.energy_budget, quant.energy_quantum)

    bound = n * (budget_t + 1) * (budget_e + 1) * _MEMO_BOUND_BYTES
    if bound > memory_cap_bytes:
        raise MemoryCapExceeded(bound, memory_cap_bytes)

    bt, be, ct, ce, acc = _tables(instance, quant)
    if n + 100 > sys.getrecursionlimit():
        sys.setrecursionlimit(n + 200)

    memo: dict[tuple[int, int, int], tuple | None] = {}
    empty = (0.0, 0.0, 0.0, ())

    def best(j: int, t_rem: int, e_rem: int):
        if j == n:
            return empty
        key = (j, t_rem, e_rem)
        hit = memo.get(key, 0)
        if hit != 0:
            return hit
        bt_j = bt[j]
        be_j = be[j]
        ct_j = ct[j]
        ce_j = ce[j]
        winner = None
        for i in range(k):
            dt = bt_j[i]
            de = be_j[i]
            if dt > t_rem or de > e_rem:
                continue
            sub = best(j + 1, t_rem - dt, e_rem - de)
            if sub is None:
                continue
            cand = (
                acc[i] + sub[0],
                ct_j[i] + sub[1],
                ce_j[i] + sub[2],
                (i + 1,) + sub[3],
            )
            if winner is None or _prefer(cand, winner):
                winner = cand
        memo[key] = winner
        if len(memo) % _LIVE_CHECK_EVERY == 0:
            if len(memo) * _MEMO_LIVE_BYTES > memory_cap_bytes:
                raise MemoryCapExceeded(len(memo) * _MEMO_LIVE_BYTES, memory_cap_bytes)
        return winner

    root = best(0, budget_t, budget_e)
    if root is None:
        return None
    assignment = Assignment(root[3])
    return ExactSolution(assignment, evaluate(assignment, instance).fitness)


def solve_dp(
    instance: SlotInstance,
    quant: QuantizationSpec | None = None,
    memory_cap_bytes: int = DEFAULT_MEMORY_CAP_BYTES,
) -> ExactSolution | None:
    """Bottom-up table over (job suffix, time buckets, energy buckets).

    Suffix layer j holds, for every remaining-budget cell, the best
    achievable (accuracy sum, true time, true energy) over jobs j..n-1.
    The assignment is rebuilt front to back by re-deriving, at each job,
    the smallest model index consistent with the recorded optimum, which
    reproduces the same tie-break as the memoized recursion.
    """
    quant = quant or QuantizationSpec()
    n = instance.job_count
    k = instance.model_count
    budget_t = budget_buckets(instance.constraints.time_budget_ms, quant.time_quantum)
    budget_e = budget_buckets(instance.constraints.energy_budget, quant.energy_quantum)
    shape = (budget_t + 1, budget_e + 1)

    need = 3 * (n + 1) * shape[0] * shape[1] * 8
    if need > memory_cap_bytes:
        raise MemoryCapExceeded(need, memory_cap_bytes)

    bt, be, ct, ce, acc = _tables(instance, quant)

    neg_inf = -np.inf
    pos_inf = np.inf
    layers_v = [None] * (n + 1)
    layers_t = [None] * (n + 1)
    layers_e = [None] * (n + 1)
    layers_v[n] = np.zeros(shape)
    layers_t[n] = np.zeros(shape)
    layers_e[n] = np.zeros(shape)

    for j in range(n - 1, -1, -1):
        best_v = np.full(shape, neg_inf)
        best_t = np.full(shape, pos_inf)
        best_e = np.full(shape, pos_inf)
        nxt_v = layers_v[j + 1]
        nxt_t = layers_t[j + 1]
        nxt_e = layers_e[j + 1]
        for i in range(k):
            dt = bt[j][i]
            de = be[j][i]
            if dt > budget_t or de > budget_e:
                continue
            src = (slice(0, shape[0] - dt), slice(0, shape[1] - de))
            dst = (slice(dt, None), slice(de, None))
            cand_v = np.full(shape, neg_inf)
            cand_t = np.full(shape, pos_inf)
            cand_e = np.full(shape, pos_inf)
            cand_v[dst] = acc[i] + nxt_v[src]
            cand_t[dst] = ct[j][i] + nxt_t[src]
            cand_e[dst] = ce[j][i] + nxt_e[src]
            better = (cand_v > best_v) | (
                (cand_v == best_v)
                & ((cand_t < best_t) | ((cand_t == best_t) & (cand_e < best_e)))
            )
            np.copyto(best_v, cand_v, where=better)
            np.copyto(best_t, cand_t, where=better)
            np.copyto(best_e, cand_e, where=better)
        layers_v[j] = best_v
        layers_t[j] = best_t
        layers_e[j] = best_e

    if layers_v[0][budget_t, budget_e] == neg_inf:
        return None

    # Forward reconstruction: at each job take the lowest model index whose
    # one-step cost plus the next layer's optimum matches this cell exactly.
    genes = []
    t_rem, e_rem = budget_t, budget_e
    want_v = layers_v[0][t_rem, e_rem]
    want_t = layers_t[0][t_rem, e_rem]
    want_e = layers_e[0][t_rem, e_rem]
    for j in range(n):
        chosen = -1
        for i in range(k):
            dt = bt[j][i]
            de = be[j][i]
            if dt > t_rem or de > e_rem:
                continue
            sv = layers_v[j + 1][t_rem - dt, e_rem - de]
            if sv == neg_inf:
                continue
            if (
                acc[i] + sv == want_v
                and ct[j][i] + layers_t[j + 1][t_rem - dt, e_rem - de] == want_t
                and ce[j][i] + layers_e[j + 1][t_rem - dt, e_rem - de] == want_e
            ):
                chosen = i
                break
        if chosen < 0:  # pragma: no cover - the recorded optimum is always rederivable
            raise RuntimeError("table reconstruction failed")
        genes.append(chosen + 1)
        t_rem -= bt[j][chosen]
        e_rem -= be[j][chosen]
        want_v = layers_v[j + 1][t_rem, e_rem]
        want_t = layers_t[j + 1][t_rem, e_rem]
        want_e = layers_e[j + 1][t_rem, e_rem]

    assignment = Assignment(tuple(genes))
    return ExactSolution(assignment, evaluate(assignment, instance).fitness)
