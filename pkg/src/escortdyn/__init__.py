"""Escort replicator dynamics and the information geometry behind them."""

from .errors import (
    ConfigError,
    ConvergenceError,
    DimensionError,
    DivergenceInfinite,
    DomainError,
    EscortError,
    PositivityError,
    QuadratureError,
    RangeError,
)
from .simplex import SimplexPoint, as_simplex, barycenter, random_interior
from .escorts import (
    Constant,
    Custom,
    Escort,
    Exponential,
    Identity,
    Power,
    Scaled,
    VectorValued,
    escort_distribution,
    escort_exp,
    escort_expectation,
    escort_log,
    escort_variance,
    partition_function,
)
from .geometry import (
    DiagonalMetric,
    escort_divergence,
    escort_metric,
    geodesic_distance_identity,
    metric_inner_product,
    sphere_coordinate,
)
from .landscapes import (
    BUILTIN_LANDSCAPES,
    FitnessLandscape,
    builtin_landscape,
    exp_decay_landscape,
    gauge_project,
    gauge_shift,
    neg_identity_landscape,
    rsp_matrix,
)
from .dynamics import (
    DiagnosticsRow,
    Termination,
    Trajectory,
    discrete_step,
    escort_mean_fitness,
    integrate,
    integrate_formal_solution,
    vector_field,
)
from .analysis import (
    ESSReport,
    ess_check_sampled,
    fisher_rate,
    integral_of_motion,
    is_rest_point,
    lyapunov_series,
    monotone_nonincreasing,
)

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_LANDSCAPES",
    "ConfigError",
    "Constant",
    "ConvergenceError",
    "Custom",
    "DiagonalMetric",
    "DiagnosticsRow",
    "DimensionError",
    "DivergenceInfinite",
    "DomainError",
    "ESSReport",
    "Escort",
    "EscortError",
    "Exponential",
    "FitnessLandscape",
    "Identity",
    "PositivityError",
    "Power",
    "QuadratureError",
    "RangeError",
    "Scaled",
    "SimplexPoint",
    "Termination",
    "Trajectory",
    "VectorValued",
    "as_simplex",
    "barycenter",
    "builtin_landscape",
    "discrete_step",
    "escort_distribution",
    "escort_divergence",
    "escort_exp",
    "escort_expectation",
    "escort_log",
    "escort_mean_fitness",
    "escort_metric",
    "escort_variance",
    "ess_check_sampled",
    "exp_decay_landscape",
    "fisher_rate",
    "gauge_project",
    "gauge_shift",
    "geodesic_distance_identity",
    "integral_of_motion",
    "integrate",
    "integrate_formal_solution",
    "is_rest_point",
    "lyapunov_series",
    "metric_inner_product",
    "monotone_nonincreasing",
    "neg_identity_landscape",
    "partition_function",
    "random_interior",
    "rsp_matrix",
    "sphere_coordinate",
    "vector_field",
]
