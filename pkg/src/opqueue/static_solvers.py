"""Closed-form solvers for static decision queues.

Two problems over a fixed batch of N identical binary decision tasks:

* **Time constrained** -- split a total attention budget T among the tasks
  to maximize the summed accuracy.  Because the accuracy curve is sigmoidal,
  the optimum concentrates the budget: it serves ``m*`` tasks for ``T/m*``
  seconds each and drops the rest, where ``m*`` maximizes ``m * f(T/m)``.
* **Latency penalty** -- no deadline, but every pending task costs ``c`` per
  second, so task ``l`` of N effectively pays rate ``c*(N - l + 1)`` while
  being served.  Each stage independently either drops the task or serves it
  for the time where the accuracy slope equals that effective rate (on the
  decaying side of the slope curve), whichever yields the better stage value.

Both solvers are pure functions; the per-stage computations of the latency
solver are independent and order-insensitive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError
from .sigmoid import (
    SigmoidModel,
    derivative,
    derivative_inverse,
    inflection_point,
    value,
)

__all__ = [
    "AllocationVector",
    "StaticReward",
    "solve_time_constrained",
    "solve_static_latency",
]

_TIE_TOL = 1e-12


@dataclass(frozen=True)
class AllocationVector:
    """Ordered per-task service durations; dropped tasks are exactly 0.0."""

    durations: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.durations) == 0:
            raise DomainError("allocation must cover at least one task")
        for i, t in enumerate(self.durations):
            if not (t >= 0.0) or not math.isfinite(t):
                raise DomainError(f"duration {i + 1} must be finite and >= 0, got {t}")
        object.__setattr__(self, "durations", tuple(float(t) for t in self.durations))

    def __len__(self) -> int:
        return len(self.durations)

    def __iter__(self):
        return iter(self.durations)

    @property
    def total(self) -> float:
        return math.fsum(self.durations)

    @property
    def served_indices(self) -> tuple[int, ...]:
        """1-based indices of tasks receiving positive time."""
        return tuple(i + 1 for i, t in enumerate(self.durations) if t > 0.0)


@dataclass(frozen=True)
class StaticReward:
    """Per-task rewards and penalties with their exact net total.

    ``total`` is always ``sum(rewards) - sum(penalties)``; ``per_stage_mean``
    divides it by the task count for reporting the averaged objective of the
    latency problem.
    """

    rewards: tuple[float, ...]
    penalties: tuple[float, ...]
    total: float = field(init=False)

    def __post_init__(self) -> None:
        if len(self.rewards) != len(self.penalties):
            raise DomainError("rewards and penalties must have equal length")
        object.__setattr__(
            self,
            "total",
            math.fsum(self.rewards) - math.fsum(self.penalties),
        )

    @property
    def per_stage_mean(self) -> float:
        return self.total / len(self.rewards)


def solve_time_constrained(
    model: SigmoidModel, tasks: int, budget: float
) -> tuple[AllocationVector, StaticReward, int]:
    """Best equal-split allocation of ``budget`` seconds over ``tasks`` tasks.

    Evaluates ``m * f(budget/m)`` for every served count m in 1..tasks and
    serves the first ``m*`` tasks for ``budget/m*`` seconds each (ties on the
    objective, within 1e-12, go to the smaller m).  The reward accounts only
    the served tasks; dropped tasks yield nothing here.  The returned
    durations sum to ``budget`` exactly, with any float residue folded into
    the last served entry.
    """
    if tasks < 1:
        raise DomainError(f"task count must be >= 1, got {tasks}")
    if budget <= 0.0 or not math.isfinite(budget):
        raise DomainError(f"time budget must be positive and finite, got {budget}")

    best_m, best_score = 1, value(model, budget)
    for m in range(2, tasks + 1):
        score = m * value(model, budget / m)
        if score > best_score + _TIE_TOL:
            best_m, best_score = m, score

    share = budget / best_m
    head = [share] * (best_m - 1)
    last = budget - math.fsum(head)
    durations = tuple(head) + (last,) + (0.0,) * (tasks - best_m)
    allocation = AllocationVector(durations)
    rewards = tuple(value(model, t) if t > 0.0 else 0.0 for t in durations)
    reward = StaticReward(rewards=rewards, penalties=(0.0,) * tasks)
    return allocation, reward, best_m


def solve_static_latency(
    model: SigmoidModel, tasks: int, penalty_rate: float
) -> tuple[AllocationVector, StaticReward]:
    """Per-stage drop-or-serve allocation under a waiting cost.

    Stage ``l`` (1-based) faces effective penalty rate
    ``penalty_rate * (tasks - l + 1)``.  When that rate exceeds the maximum
    accuracy slope the stage objective decreases everywhere and the task is
    dropped.  Otherwise the candidate service time solves
    ``f'(t) = rate`` past the inflection point, and the stage keeps whichever
    of {drop, serve} scores better (ties, within 1e-12, drop).

    A dropped task still collects the zero-time accuracy ``f(0)`` -- the
    operator answers instantly -- which is exactly the boundary value the
    serve candidate must beat.
    """
    if tasks < 1:
        raise DomainError(f"task count must be >= 1, got {tasks}")
    if penalty_rate <= 0.0 or not math.isfinite(penalty_rate):
        raise DomainError(f"penalty rate must be positive, got {penalty_rate}")

    slope_max = derivative(model, inflection_point(model))
    drop_value = value(model, 0.0)

    durations: list[float] = []
    for stage in range(1, tasks + 1):
        rate = penalty_rate * (tasks - stage + 1)
        if rate > slope_max:
            durations.append(0.0)
            continue
        t_serve = derivative_inverse(model, rate, "upper")
        serve_value = value(model, t_serve) - rate * t_serve
        durations.append(t_serve if serve_value > drop_value + _TIE_TOL else 0.0)

    allocation = AllocationVector(tuple(durations))
    rewards = tuple(value(model, t) for t in durations)
    penalties = tuple(
        penalty_rate * (tasks - i) * t for i, t in enumerate(durations)
    )
    return allocation, StaticReward(rewards=rewards, penalties=penalties)
