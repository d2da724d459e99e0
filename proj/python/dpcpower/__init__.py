"""Minimum-power user selection for DPC multiuser MIMO downlinks."""

from ._core import (
    BudgetError,
    ConfigError,
    DimensionError,
    DistributionSpec,
    DivergenceError,
    DomainError,
    Error,
    FullSpaceError,
    InfeasibleGeometryError,
    NumericalError,
    RankDeficiencyError,
    alpha,
    analytic_average_power,
    approx_min_power,
    cdf,
    cli,
    downlink_dual_solution,
    evaluate_sinr,
    exact_min_power,
    figure_config,
    mean_inverse,
    p_aus_2,
    p_lower_bound_2,
    p_nus,
    p_rus,
    p_sus,
    pdf,
    run_config,
    sample_channels,
    select,
    sin_sq_angle,
)

__all__ = [name for name in dir() if not name.startswith("_")]
