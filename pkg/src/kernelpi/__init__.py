"""Kernel-based value function approximation and policy iteration.

Approximates the cost-to-go of feedback policies for control-affine systems
by least-squares Galerkin solves over spans of kernel sections, improves
policies from the fitted gradients, and ships benchmark studies that measure
how errors decay with the fill distance of the center set.
"""

from .dynamics import (
    Benchmark,
    ControlAffineSystem,
    CostSpec,
    Policy,
    SmoothValue,
    StabilityReport,
    Trajectory,
    benchmark_system,
    closed_loop_field,
    pde_rhs,
    running_cost,
    simulate,
    verify_stabilizing,
)
from .errors import (
    ConfigError,
    NonFiniteError,
    PEViolationError,
    SingularGramError,
    UnstablePolicyError,
    UnsupportedDerivativeError,
)
from .galerkin import (
    GalerkinSystem,
    anchored_values,
    assemble,
    phi_matrix,
    residual_norm,
    solve_value,
    unsym_kernel,
)
from .geometry import (
    CenterSet,
    Domain,
    fill_distance,
    greedy_augment,
    grid_centers,
    unit_box,
)
from .kernels import (
    GramFactorization,
    Kernel,
    factorize,
    grad_gram,
    grad_x,
    gram,
    kernel_eval,
)
from .native import (
    Approximant,
    h_distance,
    interpolate,
    power_function,
    projected_kernel,
    zero_approximant,
)
from .policy_iteration import (
    PIIterate,
    PIResult,
    controller_error,
    policy_iterate,
    policy_update,
)
from .quadrature import QuadratureRule, gauss_legendre_tensor, integrate

__version__ = "0.1.0"

__all__ = [
    "Approximant",
    "Benchmark",
    "CenterSet",
    "ConfigError",
    "ControlAffineSystem",
    "CostSpec",
    "Domain",
    "GalerkinSystem",
    "GramFactorization",
    "Kernel",
    "NonFiniteError",
    "PEViolationError",
    "PIIterate",
    "PIResult",
    "Policy",
    "QuadratureRule",
    "SingularGramError",
    "SmoothValue",
    "StabilityReport",
    "Trajectory",
    "UnstablePolicyError",
    "UnsupportedDerivativeError",
    "anchored_values",
    "assemble",
    "benchmark_system",
    "closed_loop_field",
    "controller_error",
    "factorize",
    "fill_distance",
    "gauss_legendre_tensor",
    "grad_gram",
    "grad_x",
    "gram",
    "greedy_augment",
    "grid_centers",
    "h_distance",
    "integrate",
    "interpolate",
    "kernel_eval",
    "pde_rhs",
    "phi_matrix",
    "policy_iterate",
    "policy_update",
    "power_function",
    "projected_kernel",
    "residual_norm",
    "running_cost",
    "simulate",
    "solve_value",
    "unit_box",
    "unsym_kernel",
    "verify_stabilizing",
    "zero_approximant",
]
