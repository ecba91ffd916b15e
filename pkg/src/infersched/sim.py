"""Workload generation and the time-slot simulation loop.

Jobs stream in fixed-size slots; each selected scheme schedules every slot
under the same budgets, the solver call is timed, and execution is then
realised by jittering the per-job estimates.  Estimated totals of feasible
schedules always respect the budgets; realised totals may overshoot them,
which is recorded but never rejected.
"""
from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from . import schedulers
from .core import (
    ChannelModel,
    ConstraintPair,
    ContractViolation,
    JobSpec,
    Locality,
    ModelProfile,
    NEG_INF,
    SlotInstance,
    evaluate,
)
from .defaults import DEFAULT_JOB_COUNT, DEFAULT_JOBS_PER_SLOT, DEFAULT_MEDIAN_MB, DEFAULT_SIGMA_LOG
from .io import InputError, load_sizes
from .rng import derive_seed, seeded_rng

log = logging.getLogger("infersched.sim")

SLOT_CSV_HEADER = "slot,scheme,est_time_ms,est_energy,real_time_ms,real_energy,avg_accuracy,sched_time_ms,feasible"
SWEEP_CSV_HEADER = "constraint_value,model_id,count"

_JITTER_FLOOR = 0.1  # realized multipliers never fall below a tenth of the mean


class AccuracyRealization(Enum):
    EXPECTED = "expected"
    BERNOULLI = "bernoulli"


@dataclass(frozen=True)
class WorkloadSpec:
    """How to produce the job stream.

    Sizes come from a lognormal with the given median and log-space sigma,
    or verbatim from a sizes file (one decimal megabyte value per line),
    in which case the file's length wins over ``job_count``.
    """

    job_count: int = DEFAULT_JOB_COUNT
    jobs_per_slot: int = DEFAULT_JOBS_PER_SLOT
    median_mb: float = DEFAULT_MEDIAN_MB
    sigma_log: float = DEFAULT_SIGMA_LOG
    sizes_file: str | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.jobs_per_slot < 1:
            raise ContractViolation("jobs_per_slot must be at least 1")
        if self.sizes_file is None:
            if self.job_count < self.jobs_per_slot:
                raise ContractViolation("job_count must be at least jobs_per_slot")
            if not self.median_mb > 0.0:
                raise ContractViolation("median_mb must be positive")
            if self.sigma_log < 0.0:
                raise ContractViolation("sigma_log must be non-negative")


@dataclass(frozen=True)
class ExecutionNoise:
    """Deviation model between estimated and realised execution."""

    time_jitter_cv: float = 0.05
    accuracy_realization: AccuracyRealization = AccuracyRealization.EXPECTED

    def __post_init__(self) -> None:
        if self.time_jitter_cv < 0.0:
            raise ContractViolation("time_jitter_cv must be non-negative")


@dataclass
class SlotReport:
    slot_index: int
    scheme: str
    genes: tuple[int, ...]
    objective: float
    est_time_ms: float
    est_energy: float
    real_time_ms: float
    real_energy: float
    avg_accuracy: float
    realized_correct: int | None
    sched_time_ms: float
    feasible: bool
    partial: bool = False
    over_budget: bool = False


@dataclass
class RunSummary:
    scheme: str
    average_accuracy: float
    average_power: float
    average_inference_time_ms: float
    average_scheduling_time_ms: float
    total_time_ms: float
    slots: int = 0
    infeasible_slots: int = 0


def generate_workload(spec: WorkloadSpec) -> list[JobSpec]:
    """Deterministic job stream under the spec's seed.

    Lognormal sizes keep the occasional much-larger-than-average payload
    that produces the spikes seen in per-slot cost traces.
    """
    if spec.sizes_file is not None:
        sizes = load_sizes(spec.sizes_file)
    else:
        rng = seeded_rng(derive_seed(spec.seed, "workload"))
        sizes = [
            spec.median_mb * math.exp(spec.sigma_log * rng.gauss()) for _ in range(spec.job_count)
        ]
    return [JobSpec(id=i, size_mb=size) for i, size in enumerate(sizes)]


def slice_slots(jobs: Sequence[JobSpec], jobs_per_slot: int) -> list[list[JobSpec]]:
    """Chunk the stream; a short final chunk is kept and flagged downstream."""
    return [list(jobs[i : i + jobs_per_slot]) for i in range(0, len(jobs), jobs_per_slot)]


def _jitter(rng, cv: float) -> float:
    # Multiplicative lognormal with mean exactly 1 at any cv; cv == 0 stays
    # an exact identity so noiseless runs reproduce estimates bit for bit.
    if cv == 0.0:
        return 1.0
    sigma2 = math.log(1.0 + cv * cv)
    value = math.exp(-0.5 * sigma2 + math.sqrt(sigma2) * rng.gauss())
    return max(value, _JITTER_FLOOR)


def _realize(
    instance: SlotInstance,
    genes: tuple[int, ...],
    noise: ExecutionNoise,
    cell_seed: int,
) -> tuple[float, float, int | None]:
    """Sample realised time/energy and, optionally, per-job correctness.

    Each job's time scales by one lognormal jitter draw; the transfer
    energy of offloaded jobs scales by the same draw (a slower transfer
    burns proportionally more), while local inference energy is the
    profiled constant.
    """
    rng = seeded_rng(cell_seed)
    costs = instance.costs()
    catalog = instance.catalog
    total_t = 0.0
    total_e = 0.0
    for j, g in enumerate(genes):
        i = g - 1
        factor = _jitter(rng, noise.time_jitter_cv)
        total_t += costs.time_ms[j][i] * factor
        model = catalog[i]
        if model.locality is Locality.REMOTE:
            transfer = costs.energy[j][i] - model.inference_energy
            total_e += model.inference_energy + transfer * factor
        else:
            total_e += model.inference_energy
    correct: int | None = None
    if noise.accuracy_realization is AccuracyRealization.BERNOULLI:
        correct = 0
        for g in genes:
            if rng.random() < catalog[g - 1].avg_accuracy / 100.0:
                correct += 1
    return total_t, total_e, correct


def _run_cell(
    slot_index: int,
    slot_jobs: list[JobSpec],
    scheme: str,
    catalog: Sequence[ModelProfile],
    channel: ChannelModel,
    constraints: ConstraintPair,
    noise: ExecutionNoise,
    seed: int,
    overrides: Mapping | None,
    partial: bool,
    instance: SlotInstance,
) -> SlotReport:
    solver_seed = derive_seed(seed, "sched", slot_index, scheme)
    result = schedulers.solve(scheme, instance, solver_seed, overrides)
    if not result.feasible:
        log.info("slot %d scheme %s found no feasible schedule", slot_index, scheme)
        return SlotReport(
            slot_index=slot_index,
            scheme=scheme,
            genes=(),
            objective=NEG_INF,
            est_time_ms=0.0,
            est_energy=0.0,
            real_time_ms=0.0,
            real_energy=0.0,
            avg_accuracy=0.0,
            realized_correct=None,
            sched_time_ms=result.scheduling_time_ms,
            feasible=False,
            partial=partial,
        )
    genes = result.assignment.genes
    ev = evaluate(result.assignment, instance)
    real_t, real_e, correct = _realize(
        instance, genes, noise, derive_seed(seed, "noise", slot_index, scheme)
    )
    over = real_t > constraints.time_budget_ms or real_e > constraints.energy_budget
    if over:
        log.debug("slot %d scheme %s realised totals overshoot a budget", slot_index, scheme)
    return SlotReport(
        slot_index=slot_index,
        scheme=scheme,
        genes=genes,
        objective=result.objective,
        est_time_ms=ev.total_time,
        est_energy=ev.total_energy,
        real_time_ms=real_t,
        real_energy=real_e,
        avg_accuracy=result.objective / len(slot_jobs),
        realized_correct=correct,
        sched_time_ms=result.scheduling_time_ms,
        feasible=True,
        partial=partial,
        over_budget=over,
    )


def summarize(reports: Iterable[SlotReport]) -> dict[str, RunSummary]:
    """Per-scheme averages over all scheduled slots.

    Accuracy and realised-cost averages cover feasible slots only;
    infeasible slots are counted separately.  Scheduling time averages
    over every slot (the solver ran either way).
    """
    by_scheme: dict[str, list[SlotReport]] = {}
    for report in reports:
        by_scheme.setdefault(report.scheme, []).append(report)
    summaries: dict[str, RunSummary] = {}
    for scheme, rows in by_scheme.items():
        feasible = [r for r in rows if r.feasible]
        count = len(feasible)
        avg_acc = sum(r.avg_accuracy for r in feasible) / count if count else 0.0
        avg_power = sum(r.real_energy for r in feasible) / count if count else 0.0
        avg_time = sum(r.real_time_ms for r in feasible) / count if count else 0.0
        avg_sched = sum(r.sched_time_ms for r in rows) / len(rows) if rows else 0.0
        summaries[scheme] = RunSummary(
            scheme=scheme,
            average_accuracy=avg_acc,
            average_power=avg_power,
            average_inference_time_ms=avg_time,
            average_scheduling_time_ms=avg_sched,
            total_time_ms=avg_time + avg_sched,
            slots=len(rows),
            infeasible_slots=len(rows) - count,
        )
    return summaries


def run_simulation(
    jobs: Sequence[JobSpec],
    catalog: Sequence[ModelProfile],
    channel: ChannelModel,
    constraints: ConstraintPair,
    schemes: Sequence[str],
    noise: ExecutionNoise,
    seed: int,
    *,
    jobs_per_slot: int = DEFAULT_JOBS_PER_SLOT,
    slots: int | None = None,
    scheme_params: Mapping[str, Mapping] | None = None,
    threads: int = 1,
) -> tuple[list[SlotReport], dict[str, RunSummary]]:
    """Schedule and realise every (slot, scheme) cell.

    Deterministic for a given seed regardless of ``threads``: every cell
    derives its own solver and noise streams.  Wall-clock scheduling times
    are only comparable across schemes when ``threads == 1``.
    """
    for scheme in schemes:
        if scheme not in schedulers.SCHEME_NAMES:
            raise schedulers.UnknownSchemeError(scheme)
    scheme_params = scheme_params or {}
    slot_lists = slice_slots(jobs, jobs_per_slot)
    if slots is not None:
        slot_lists = slot_lists[:slots]
    instances = [
        SlotInstance(slot_jobs, catalog, channel, constraints) for slot_jobs in slot_lists
    ]
    cells = []
    for slot_index, slot_jobs in enumerate(slot_lists):
        partial = len(slot_jobs) < jobs_per_slot
        for scheme in schemes:
            cells.append((slot_index, slot_jobs, scheme, partial))

    def work(cell) -> SlotReport:
        slot_index, slot_jobs, scheme, partial = cell
        return _run_cell(
            slot_index,
            slot_jobs,
            scheme,
            catalog,
            channel,
            constraints,
            noise,
            seed,
            scheme_params.get(scheme),
            partial,
            instances[slot_index],
        )

    if threads > 1:
        log.warning("threads=%d: scheduling-time columns are not exclusive measurements", threads)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(work, cells))
    else:
        reports = [work(cell) for cell in cells]
    order = {scheme: pos for pos, scheme in enumerate(schemes)}
    reports.sort(key=lambda r: (r.slot_index, order[r.scheme]))
    return reports, summarize(reports)


def sweep_constraint(
    jobs: Sequence[JobSpec],
    catalog: Sequence[ModelProfile],
    channel: ChannelModel,
    axis: str,
    values: Sequence[float],
    fixed_budget: float,
    scheme: str,
    *,
    jobs_per_slot: int = DEFAULT_JOBS_PER_SLOT,
    slots: int = 10,
    seed: int = 0,
    scheme_params: Mapping | None = None,
) -> list[tuple[float, int, int]]:
    """Model-allocation histogram while one budget varies.

    For each constraint value the same representative slots are scheduled
    and assignments are counted per model over feasible slots.  Returns
    (constraint_value, model_id, count) rows covering every model.
    """
    if axis not in ("time", "energy"):
        raise InputError(f"axis must be 'time' or 'energy', got {axis!r}")
    if len(values) == 0:
        raise InputError("sweep needs at least one constraint value")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise InputError("sweep values must be strictly increasing")
    slot_lists = slice_slots(jobs, jobs_per_slot)[:slots]
    rows: list[tuple[float, int, int]] = []
    for value in values:
        if axis == "time":
            constraints = ConstraintPair(time_budget_ms=value, energy_budget=fixed_budget)
        else:
            constraints = ConstraintPair(time_budget_ms=fixed_budget, energy_budget=value)
        counts = {model.id: 0 for model in catalog}
        for slot_index, slot_jobs in enumerate(slot_lists):
            instance = SlotInstance(slot_jobs, catalog, channel, constraints)
            solver_seed = derive_seed(seed, "sched", slot_index, scheme)
            result = schedulers.solve(scheme, instance, solver_seed, scheme_params)
            if not result.feasible:
                continue
            for gene in result.assignment.genes:
                counts[catalog[gene - 1].id] += 1
        for model in catalog:
            rows.append((value, model.id, counts[model.id]))
    return rows


def accuracy_difference_series(
    reports: Sequence[SlotReport], baseline_scheme: str
) -> dict[str, list[float]]:
    """Per-slot objective gap (baseline minus scheme) for every other scheme.

    Slots where a scheme found no feasible schedule contribute with an
    objective of zero.
    """
    by_scheme: dict[str, dict[int, float]] = {}
    for report in reports:
        objective = report.objective if report.feasible else 0.0
        by_scheme.setdefault(report.scheme, {})[report.slot_index] = objective
    if baseline_scheme not in by_scheme:
        raise InputError(f"baseline scheme {baseline_scheme!r} not present in reports")
    base = by_scheme[baseline_scheme]
    slots = sorted(base)
    series: dict[str, list[float]] = {}
    for scheme, values in by_scheme.items():
        if scheme == baseline_scheme:
            continue
        if sorted(values) != slots:
            raise InputError(f"scheme {scheme!r} does not cover the baseline's slots")
        series[scheme] = [base[s] - values[s] for s in slots]
    return series


# ---------------------------------------------------------------------------
# output files


def _fmt(value: float) -> str:
    return format(value, ".10g")


def write_slot_csv(reports: Sequence[SlotReport], path: str | Path) -> None:
    lines = [SLOT_CSV_HEADER]
    for r in reports:
        lines.append(
            ",".join(
                (
                    str(r.slot_index),
                    r.scheme,
                    _fmt(r.est_time_ms),
                    _fmt(r.est_energy),
                    _fmt(r.real_time_ms),
                    _fmt(r.real_energy),
                    _fmt(r.avg_accuracy),
                    _fmt(r.sched_time_ms),
                    "true" if r.feasible else "false",
                )
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def summary_to_json(
    summaries: Mapping[str, RunSummary], metadata: Mapping | None = None
) -> dict:
    return {
        "metadata": dict(metadata or {}),
        "schemes": {
            name: {
                "average_accuracy": s.average_accuracy,
                "average_power": s.average_power,
                "average_inference_time_ms": s.average_inference_time_ms,
                "average_scheduling_time_ms": s.average_scheduling_time_ms,
                "total_time_ms": s.total_time_ms,
                "slots": s.slots,
                "infeasible_slots": s.infeasible_slots,
            }
            for name, s in summaries.items()
        },
    }


def write_summary_json(
    summaries: Mapping[str, RunSummary], metadata: Mapping | None, path: str | Path
) -> None:
    payload = summary_to_json(summaries, metadata)
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def write_sweep_csv(rows: Sequence[tuple[float, int, int]], path: str | Path) -> None:
    lines = [SWEEP_CSV_HEADER]
    for value, model_id, count in rows:
        lines.append(f"{_fmt(value)},{model_id},{count}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
