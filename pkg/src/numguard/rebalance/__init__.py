from .core import (
    FLT_EPSILON,
    PreconditionError,
    RebalanceOutput,
    RebalanceStep,
    TaskDistribution,
    exact_share_bounds,
    is_nearly_equal,
    rebalance_float,
    rebalance_int,
    rebalance_int_trace,
    rebalance_rational,
)
from .fuzz import (
    DifferentialReport,
    FuzzConfig,
    FuzzReport,
    RebalanceCounterexample,
    differential_fuzz,
    find_float_counterexamples,
    lattice_value,
    sample_value,
)

__all__ = [
    "FLT_EPSILON",
    "PreconditionError",
    "RebalanceOutput",
    "RebalanceStep",
    "TaskDistribution",
    "exact_share_bounds",
    "is_nearly_equal",
    "rebalance_float",
    "rebalance_int",
    "rebalance_int_trace",
    "rebalance_rational",
    "DifferentialReport",
    "FuzzConfig",
    "FuzzReport",
    "RebalanceCounterexample",
    "differential_fuzz",
    "find_float_counterexamples",
    "lattice_value",
    "sample_value",
]
