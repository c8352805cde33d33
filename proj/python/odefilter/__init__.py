"""Gaussian ODE filters: priors, Kalman stepping, steady states and sweeps."""

from ._core import (
    OdefilterError,
    closed_form,
    drift_matrix,
    fit_order,
    noise_permissible,
    noise_value,
    orbit_limit,
    predicted_exponents,
    problem_names,
    run_cli,
    solve,
    transition,
    transition_oracle,
    verify_order_bounds,
)

__all__ = [
    "OdefilterError",
    "closed_form",
    "drift_matrix",
    "fit_order",
    "noise_permissible",
    "noise_value",
    "orbit_limit",
    "predicted_exponents",
    "problem_names",
    "run_cli",
    "solve",
    "transition",
    "transition_oracle",
    "verify_order_bounds",
]
