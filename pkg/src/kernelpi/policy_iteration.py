"""Policy iteration: alternate value solves with greedy policy updates.

Each round evaluates the current feedback by solving the Galerkin system for
its cost-to-go, then improves the feedback through

    mu_next(x) = -0.5 R^{-1} g(x)^T grad v(x).

Iteration stops when successive policies agree to tolerance on a probe grid
or the iteration budget is exhausted.  Because policy updates use only the
gradient of the value iterate, the constant-offset indeterminacy of the value
solve (see :mod:`.galerkin`) does not enter the loop.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .dynamics import Policy
from .errors import PEViolationError, UnstablePolicyError
from .galerkin import assemble, residual_norm, solve_value
from .geometry import unit_box
from .native import Approximant


@dataclass(frozen=True)
class PIIterate:
    """One evaluation/update round: value iterate, improved policy, diagnostics."""

    value: Approximant
    policy: Policy
    policy_delta: float
    pe_margin: float
    residual: float
    condition: float = float("nan")


@dataclass(frozen=True)
class PIResult:
    """Full iterate history plus the stopping outcome."""

    iterates: tuple
    converged: bool
    iterations_used: int

    @property
    def final_value(self):
        return self.iterates[-1].value if self.iterates else None

    @property
    def final_policy(self):
        return self.iterates[-1].policy if self.iterates else None


def policy_update(value, system, R):
    """Greedy feedback improvement from a value estimate's gradient.

    ``value`` may be an :class:`Approximant` or any object with a
    ``gradient(x)`` method (closed-form references included).  Warns when the
    resulting feedback misses the admissibility condition u(0) = 0 by more
    than 1e-6; fitted gradients need not vanish exactly at the origin.
    """
    R = np.atleast_2d(np.asarray(R, dtype=float))
    R_inv = np.linalg.inv(R)

    def fn(x):
        return -0.5 * R_inv @ (system.g(x).T @ value.gradient(x))

    provenance = "kernel-approximant" if isinstance(value, Approximant) else "explicit-formula"
    origin_miss = float(np.linalg.norm(fn(np.zeros(system.dim))))
    if origin_miss > 1e-6:
        warnings.warn(
            f"updated policy misses u(0)=0 by {origin_miss:.2e}; "
            "the value gradient does not vanish at the origin",
            stacklevel=2,
        )
    return Policy(fn=fn, provenance=provenance)


def eval_policy_batch(policy, X):
    """Policy evaluated on rows of X; shape (m, input_dim)."""
    return np.array([policy(x) for x in np.atleast_2d(X)])


def controller_error(policy, reference, domain, probe_n=101):
    """Worst-case feedback discrepancy over a probe grid (max-abs per input)."""
    if probe_n < 2:
        raise ValueError("probe_n must be >= 2")
    probe = domain.grid(probe_n)
    diff = eval_policy_batch(policy, probe) - eval_policy_batch(reference, probe)
    return float(np.abs(diff).max())


def policy_iterate(kernel, centers, system, cost, mu0, rule, tol=1e-6, max_iter=20,
                   domain=None, probe_n=101, check_stabilizing=True,
                   pe_threshold=None):
    """Run policy iteration from an initial stabilizing feedback.

    The initial policy is gated through the simulation-based stabilization
    check unless ``check_stabilizing`` is False; a failing gate raises
    :class:`UnstablePolicyError`.  Excitation failures during any round are
    re-raised with the round index attached.  A zero iteration budget returns
    an empty, non-converged result.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if domain is None:
        domain = unit_box(system.dim)
    if check_stabilizing:
        from .dynamics import verify_stabilizing

        report = verify_stabilizing(system, mu0, domain)
        if not report.passed:
            raise UnstablePolicyError(
                "initial policy failed the stabilization check; "
                "pass check_stabilizing=False to override"
            )
    if max_iter <= 0:
        return PIResult(iterates=(), converged=False, iterations_used=0)

    probe = domain.grid(probe_n)
    current = mu0
    prev_values = eval_policy_batch(current, probe)
    iterates = []
    converged = False
    for i in range(max_iter):
        gsys = assemble(kernel, centers, system, current, cost, rule)
        try:
            value = solve_value(gsys, kernel, centers, pe_threshold=pe_threshold)
        except PEViolationError as err:
            err.iteration = i
            raise
        improved = policy_update(value, system, cost.R)
        new_values = eval_policy_batch(improved, probe)
        delta = float(np.abs(new_values - prev_values).max())
        iterates.append(PIIterate(
            value=value,
            policy=improved,
            policy_delta=delta,
            pe_margin=gsys.pe_margin,
            residual=residual_norm(gsys, value.coefficients),
            condition=gsys.condition_estimate,
        ))
        current, prev_values = improved, new_values
        if delta <= tol:
            converged = True
            break
    return PIResult(iterates=tuple(iterates), converged=converged,
                    iterations_used=len(iterates))
