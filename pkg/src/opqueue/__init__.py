"""Optimal duration allocation for operator decision queues.

An operator serves a queue of binary decision tasks whose accuracy grows
sigmoidally with the time spent on them, while waiting tasks lose value at a
constant rate.  This package provides the accuracy models, closed-form
solvers for the static queue problems, a finite-horizon solver for the
arrival queue, and a receding-horizon simulator, plus a CLI wrapping all of
them.
"""

from .dynamic_solver import (
    CandidateRecord,
    CandidateSolution,
    FiniteHorizonResult,
    ProcessedSet,
    QueueParams,
    Region,
    effective_penalty,
    existence_check,
    expected_queue_evolution,
    min_feasible_first_allocation,
    objective_value,
    solve_consistent_allocation,
    solve_finite_horizon,
)
from .errors import (
    CapacityError,
    ConfigError,
    DomainError,
    NoSolutionError,
    NumericError,
    OpqueueError,
)
from .sigmoid import (
    DerivativeProfile,
    DriftDiffusionModel,
    PewModel,
    SigmoidModel,
    curvature_crossings,
    derivative,
    derivative_inverse,
    derivative_profile,
    inflection_point,
    second_derivative,
    value,
)
from .simulator import (
    SimConfig,
    SimulationTrace,
    StageRecord,
    SweepPoint,
    benefit_sweep,
    optimal_arrival_rate,
    run_policy,
    sample_arrivals,
)
from .static_solvers import (
    AllocationVector,
    StaticReward,
    solve_static_latency,
    solve_time_constrained,
)

__version__ = "0.1.0"

__all__ = [
    "AllocationVector",
    "CandidateRecord",
    "CandidateSolution",
    "CapacityError",
    "ConfigError",
    "DerivativeProfile",
    "DomainError",
    "DriftDiffusionModel",
    "FiniteHorizonResult",
    "NoSolutionError",
    "NumericError",
    "OpqueueError",
    "PewModel",
    "ProcessedSet",
    "QueueParams",
    "Region",
    "SigmoidModel",
    "SimConfig",
    "SimulationTrace",
    "StageRecord",
    "StaticReward",
    "SweepPoint",
    "benefit_sweep",
    "curvature_crossings",
    "derivative",
    "derivative_inverse",
    "derivative_profile",
    "effective_penalty",
    "existence_check",
    "expected_queue_evolution",
    "inflection_point",
    "min_feasible_first_allocation",
    "objective_value",
    "optimal_arrival_rate",
    "run_policy",
    "sample_arrivals",
    "second_derivative",
    "solve_consistent_allocation",
    "solve_finite_horizon",
    "solve_static_latency",
    "solve_time_constrained",
    "value",
    "__version__",
]
