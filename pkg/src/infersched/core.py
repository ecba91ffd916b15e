"""Domain model and cost accounting for slot-based inference scheduling.

A slot bundles jobs, a model catalog, a channel model and one pair of
budgets.  Every scheduler in this package consumes the same encoding: a
vector with one catalog index per job.  Fitness is the sum of the assigned
models' average accuracies, or the ``NEG_INF`` sentinel when either the
time or the energy budget is exceeded.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

NEG_INF = -sys.float_info.max
"""Fitness of a budget-violating assignment: most negative finite double."""


class ContractViolation(ValueError):
    """An operation was called with arguments that break its contract."""


class Locality(Enum):
    LOCAL = "local"
    REMOTE = "remote"


def _check_finite(name: str, value: float) -> float:
    if not math.isfinite(value):
        raise ContractViolation(f"{name} must be finite, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class ModelProfile:
    """Profiled averages standing in for one inference model.

    Accuracy is a top-1 percentage, inference time is in milliseconds and
    inference energy is in watt-equivalent units (the tables this package
    reproduces report power rather than energy, so the unit is documented
    as watts).
    """

    id: int
    avg_accuracy: float
    avg_inference_time_ms: float
    inference_energy: float
    locality: Locality

    def __post_init__(self) -> None:
        if not isinstance(self.id, int) or self.id < 1:
            raise ContractViolation(f"model id must be a positive integer, got {self.id!r}")
        acc = _check_finite("avg_accuracy", self.avg_accuracy)
        if not 0.0 <= acc <= 100.0:
            raise ContractViolation(f"avg_accuracy must lie in [0, 100], got {acc}")
        if _check_finite("avg_inference_time_ms", self.avg_inference_time_ms) <= 0.0:
            raise ContractViolation("avg_inference_time_ms must be positive")
        if _check_finite("inference_energy", self.inference_energy) < 0.0:
            raise ContractViolation("inference_energy must be non-negative")
        if not isinstance(self.locality, Locality):
            raise ContractViolation(f"locality must be a Locality, got {self.locality!r}")


@dataclass(frozen=True)
class ChannelModel:
    """Noise-free link between the node and the server.

    ``bandwidth_mbps`` uses decimal megabits (1 Mbit = 10**6 bits) and job
    sizes use decimal megabytes, so one megabyte transfers as 8 megabits.
    """

    bandwidth_mbps: float
    energy_per_megabyte: float
    response_time_ms: float

    def __post_init__(self) -> None:
        if _check_finite("bandwidth_mbps", self.bandwidth_mbps) <= 0.0:
            raise ContractViolation("bandwidth_mbps must be positive")
        if _check_finite("energy_per_megabyte", self.energy_per_megabyte) < 0.0:
            raise ContractViolation("energy_per_megabyte must be non-negative")
        if _check_finite("response_time_ms", self.response_time_ms) < 0.0:
            raise ContractViolation("response_time_ms must be non-negative")


@dataclass(frozen=True)
class JobSpec:
    """One inference job: an identifier and a payload size in megabytes."""

    id: int
    size_mb: float

    def __post_init__(self) -> None:
        if _check_finite("size_mb", self.size_mb) <= 0.0:
            raise ContractViolation("size_mb must be positive")


@dataclass(frozen=True)
class ConstraintPair:
    """Per-slot budgets: milliseconds of runtime and energy units."""

    time_budget_ms: float
    energy_budget: float

    def __post_init__(self) -> None:
        if _check_finite("time_budget_ms", self.time_budget_ms) <= 0.0:
            raise ContractViolation("time_budget_ms must be positive")
        if _check_finite("energy_budget", self.energy_budget) <= 0.0:
            raise ContractViolation("energy_budget must be positive")


def validate_catalog(catalog: Sequence[ModelProfile]) -> None:
    """Check the catalog invariants shared by files and instances.

    Ids must run 1..k in order, the single remote profile sits last, and
    the remote model strictly beats every local model on accuracy while
    strictly undercutting every local inference time.
    """
    if len(catalog) < 2:
        raise ContractViolation("catalog needs at least one local model plus the remote model")
    for pos, profile in enumerate(catalog, start=1):
        if profile.id != pos:
            raise ContractViolation(
                f"catalog ids must be consecutive from 1; position {pos} has id {profile.id}"
            )
    remotes = [p for p in catalog if p.locality is Locality.REMOTE]
    if len(remotes) != 1:
        raise ContractViolation(f"catalog must contain exactly one remote profile, got {len(remotes)}")
    remote = remotes[0]
    if remote is not catalog[-1]:
        raise ContractViolation("the remote profile must be the last catalog entry")
    for p in catalog[:-1]:
        if remote.avg_accuracy <= p.avg_accuracy:
            raise ContractViolation(
                "remote accuracy must strictly exceed every local accuracy "
                f"({remote.avg_accuracy} vs model {p.id} at {p.avg_accuracy})"
            )
        if remote.avg_inference_time_ms >= p.avg_inference_time_ms:
            raise ContractViolation(
                "remote inference time must be strictly below every local time "
                f"({remote.avg_inference_time_ms} vs model {p.id} at {p.avg_inference_time_ms})"
            )


# ---------------------------------------------------------------------------
# cost accounting


def offload_time(job: JobSpec, channel: ChannelModel) -> float:
    """Transfer time in milliseconds: megabits of payload over the link rate."""
    return job.size_mb * 8000.0 / channel.bandwidth_mbps


def offload_energy(job: JobSpec, channel: ChannelModel) -> float:
    """Transfer energy: payload megabytes times the per-megabyte cost."""
    return job.size_mb * channel.energy_per_megabyte


def job_time(job: JobSpec, model: ModelProfile, channel: ChannelModel) -> float:
    """Milliseconds to process one job on one model.

    Local models cost their inference time only; the remote model adds the
    transfer time and the constant response time.
    """
    if model.locality is Locality.REMOTE:
        return model.avg_inference_time_ms + offload_time(job, channel) + channel.response_time_ms
    return model.avg_inference_time_ms


def job_energy(job: JobSpec, model: ModelProfile, channel: ChannelModel) -> float:
    """Energy units to process one job on one model (transfer cost if remote)."""
    if model.locality is Locality.REMOTE:
        return model.inference_energy + offload_energy(job, channel)
    return model.inference_energy


class CostTable:
    """Per-instance (job, model) cost matrices, built once and shared."""

    __slots__ = ("time_ms", "energy", "accuracy", "_arrays")

    def __init__(self, instance: "SlotInstance"):
        catalog = instance.catalog
        channel = instance.channel
        self.time_ms = [
            [job_time(job, model, channel) for model in catalog] for job in instance.jobs
        ]
        self.energy = [
            [job_energy(job, model, channel) for model in catalog] for job in instance.jobs
        ]
        self.accuracy = [model.avg_accuracy for model in catalog]
        self._arrays = None

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Numpy views (time, energy, accuracy) for batch evaluation."""
        if self._arrays is None:
            k = len(self.accuracy)
            t = np.array(self.time_ms, dtype=np.float64).reshape(-1, k)
            e = np.array(self.energy, dtype=np.float64).reshape(-1, k)
            a = np.array(self.accuracy, dtype=np.float64)
            self._arrays = (t, e, a)
        return self._arrays


class SlotInstance:
    """One scheduling problem: jobs, catalog, channel and budgets.

    Instances are immutable after construction and safe to share between
    threads; the cost table is materialised lazily and cached.
    """

    __slots__ = ("jobs", "catalog", "channel", "constraints", "_costs")

    def __init__(
        self,
        jobs: Iterable[JobSpec],
        catalog: Iterable[ModelProfile],
        channel: ChannelModel,
        constraints: ConstraintPair,
    ):
        self.jobs: tuple[JobSpec, ...] = tuple(jobs)
        self.catalog: tuple[ModelProfile, ...] = tuple(catalog)
        validate_catalog(self.catalog)
        self.channel = channel
        self.constraints = constraints
        self._costs: CostTable | None = None

    @property
    def job_count(self) -> int:
        return len(self.jobs)

    @property
    def model_count(self) -> int:
        return len(self.catalog)

    def costs(self) -> CostTable:
        table = self._costs
        if table is None:
            table = CostTable(self)
            self._costs = table
        return table

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return (
            f"SlotInstance(jobs={self.job_count}, models={self.model_count}, "
            f"T={self.constraints.time_budget_ms}, E={self.constraints.energy_budget})"
        )


@dataclass(frozen=True)
class Assignment:
    """Solution encoding: genes[j] is the 1-based catalog index for job j."""

    genes: tuple[int, ...]

    @staticmethod
    def of(genes: Iterable[int]) -> "Assignment":
        return Assignment(tuple(int(g) for g in genes))

    def __len__(self) -> int:
        return len(self.genes)


class EvaluatedAssignment:
    """An assignment with its fitness and cost totals.

    ``fitness`` is the accuracy sum for budget-respecting assignments and
    ``NEG_INF`` otherwise.  Fitness evaluation stops accumulating as soon
    as a budget is crossed; the full ``total_time``/``total_energy`` sums
    are completed lazily on first access so fitness-only callers never pay
    for them.
    """

    __slots__ = ("assignment", "fitness", "_time", "_energy", "_done_upto", "_instance", "_key", "_row")

    def __init__(
        self,
        assignment: Assignment,
        fitness: float,
        time_ms: float,
        energy: float,
        done_upto: int,
        instance: SlotInstance,
    ):
        self.assignment = assignment
        self.fitness = fitness
        self._time = time_ms
        self._energy = energy
        self._done_upto = done_upto
        self._instance = instance
        if done_upto >= len(assignment.genes):
            self._key = (-fitness, time_ms, energy, assignment.genes)
        else:
            self._key = None
        self._row = None  # cached numpy gene row, filled by the solvers

    def _complete(self) -> None:
        costs = self._instance.costs()
        times = costs.time_ms
        energies = costs.energy
        genes = self.assignment.genes
        t = self._time
        e = self._energy
        for j in range(self._done_upto, len(genes)):
            i = genes[j] - 1
            t += times[j][i]
            e += energies[j][i]
        self._time = t
        self._energy = e
        self._done_upto = len(genes)

    @property
    def total_time(self) -> float:
        if self._done_upto < len(self.assignment.genes):
            self._complete()
        return self._time

    @property
    def total_energy(self) -> float:
        if self._done_upto < len(self.assignment.genes):
            self._complete()
        return self._energy

    @property
    def feasible(self) -> bool:
        return self.fitness != NEG_INF

    @property
    def rank_key(self) -> tuple:
        """Total order for ranking: fitness desc, then time, energy, genes."""
        key = self._key
        if key is None:
            key = (-self.fitness, self.total_time, self.total_energy, self.assignment.genes)
            self._key = key
        return key

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"EvaluatedAssignment(fitness={self.fitness!r}, genes={self.assignment.genes})"


def _validate_genes(genes: Sequence[int], instance: SlotInstance) -> None:
    if len(genes) != instance.job_count:
        raise ContractViolation(
            f"assignment length {len(genes)} does not match job count {instance.job_count}"
        )
    k = instance.model_count
    for g in genes:
        if not 1 <= g <= k:
            raise ContractViolation(f"gene {g} outside catalog range 1..{k}")


def fitness_of(genes: Sequence[int], instance: SlotInstance) -> tuple[float, float, float, int]:
    """Fast path shared by the schedulers: no wrapper object.

    Returns (fitness, partial_time, partial_energy, jobs_accumulated).
    Accumulation breaks out early once a running total crosses its budget,
    in which case fitness is ``NEG_INF`` and the totals cover only the
    first ``jobs_accumulated`` jobs.
    """
    costs = instance.costs()
    times = costs.time_ms
    energies = costs.energy
    accs = costs.accuracy
    time_budget = instance.constraints.time_budget_ms
    energy_budget = instance.constraints.energy_budget
    t = 0.0
    e = 0.0
    acc = 0.0
    for j, g in enumerate(genes):
        i = g - 1
        t += times[j][i]
        e += energies[j][i]
        if t > time_budget or e > energy_budget:
            return NEG_INF, t, e, j + 1
        acc += accs[i]
    return acc, t, e, len(genes)


def evaluate(assignment: Assignment, instance: SlotInstance) -> EvaluatedAssignment:
    """Score one assignment against one instance.

    Raises :class:`ContractViolation` on a length mismatch or an
    out-of-range gene.  Feasible assignments get the accuracy-sum fitness;
    infeasible ones get ``NEG_INF`` and lazily completed totals.
    """
    genes = assignment.genes
    _validate_genes(genes, instance)
    fitness, t, e, done = fitness_of(genes, instance)
    return EvaluatedAssignment(assignment, fitness, t, e, done, instance)


def evaluate_batch(
    genes_matrix: np.ndarray, instance: SlotInstance, validate: bool = True
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised evaluation of many assignments at once.

    ``genes_matrix`` holds one assignment per row (1-based indices).
    Returns (fitness, total_time, total_energy) arrays with ``NEG_INF``
    fitness wherever a budget is exceeded.  Sums are computed by numpy and
    can differ from the sequential path in the last few bits; callers that
    report a final answer re-evaluate it through :func:`evaluate`.
    ``validate=False`` skips the range scan for callers that construct
    rows from known-good genes.
    """
    t_tab, e_tab, acc = instance.costs().arrays()
    idx = np.asarray(genes_matrix, dtype=np.int64) - 1
    if validate:
        if idx.ndim != 2 or idx.shape[1] != instance.job_count:
            raise ContractViolation(
                f"genes matrix must be (batch, {instance.job_count}), got {idx.shape}"
            )
        if idx.size and (idx.min() < 0 or idx.max() >= instance.model_count):
            raise ContractViolation("gene outside catalog range")
    cols = np.arange(instance.job_count)
    total_t = t_tab[cols, idx].sum(axis=1)
    total_e = e_tab[cols, idx].sum(axis=1)
    fitness = acc[idx].sum(axis=1)
    infeasible = (total_t > instance.constraints.time_budget_ms) | (
        total_e > instance.constraints.energy_budget
    )
    fitness = np.where(infeasible, NEG_INF, fitness)
    return fitness, total_t, total_e
