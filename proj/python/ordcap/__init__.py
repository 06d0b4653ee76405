"""Capacity allocation for ordered-entry loss systems with heterogeneous servers."""

from ._ordcap import (
    Allocation,
    ArrivalModel,
    CapacityError,
    ConfigError,
    DomainError,
    Error,
    InsufficientDataError,
    InvariantError,
    LevelError,
    NumericError,
    OptimizationResult,
    OverflowChain,
    SimResult,
    SystemMetrics,
    blocking_probabilities,
    compute_metrics,
    ell_alpha_curve,
    ell_crossing_alpha,
    fastest_idle_distribution,
    feasible_construction,
    geometric_allocation,
    is_feasible,
    max_first_rate,
    optimize_allocation,
    residual_tail,
    run_experiment,
    simulate,
    sqrt_rho_heuristic,
    tap_objective,
    tap_optimal_value,
    tap_solution,
)

__all__ = [name for name in dir() if not name.startswith("_")]
