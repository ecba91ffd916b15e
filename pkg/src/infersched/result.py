"""Common result shape returned by every scheduling scheme."""
from __future__ import annotations

from dataclasses import dataclass, field

from .core import Assignment


@dataclass
class SchedulerResult:
    """What a solver run produced.

    ``objective`` always equals the core evaluation of ``assignment`` on
    the instance it was solved for, so no scheme can report a score its
    schedule does not realise.  ``feasible`` is False when the scheme
    never found a budget-respecting assignment; ``assignment`` then holds
    the best attempt (possibly empty) and ``objective`` the sentinel.
    """

    scheme: str
    assignment: Assignment
    objective: float
    feasible: bool
    scheduling_time_ms: float
    generations: int | None = None
    best_fitness_per_generation: list[float] = field(default_factory=list)
