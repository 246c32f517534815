"""Euler methods with adaptive radial-basis-function shape parameters."""

from .analysis import (
    ConvergenceReport,
    StabilityGrid,
    TruncationSample,
    amplification_factor,
    convergence_orders,
    convergence_study,
    fit_order,
    global_error,
    stability_scan,
    truncation_residual,
    verify_error_bound,
)
from .problems import IvpProblem, ProblemNotFoundError, get_problem, register_problem
from .rbf import (
    InterpolationSolveError,
    KernelFamily,
    RbfDomainError,
    interpolate_general,
    kernel_eval,
    left_derivative,
    two_point_weights,
)
from .steppers import (
    IntegrationError,
    LRule,
    SchemeKind,
    ShapePolicy,
    StepFlag,
    Threshold,
    Trajectory,
    eps2_exact,
    eps2_fd,
    eps2_fourth_order,
    eps2_third_order,
    integrate,
    select_consistent_root,
    step,
)

__all__ = [
    "amplification_factor",
    "convergence_orders",
    "convergence_study",
    "ConvergenceReport",
    "eps2_exact",
    "eps2_fd",
    "eps2_fourth_order",
    "eps2_third_order",
    "fit_order",
    "get_problem",
    "global_error",
    "integrate",
    "IntegrationError",
    "interpolate_general",
    "InterpolationSolveError",
    "IvpProblem",
    "kernel_eval",
    "KernelFamily",
    "left_derivative",
    "LRule",
    "ProblemNotFoundError",
    "RbfDomainError",
    "register_problem",
    "SchemeKind",
    "select_consistent_root",
    "ShapePolicy",
    "stability_scan",
    "StabilityGrid",
    "step",
    "StepFlag",
    "Threshold",
    "Trajectory",
    "truncation_residual",
    "TruncationSample",
    "two_point_weights",
    "verify_error_bound",
]

__version__ = "0.1.0"
