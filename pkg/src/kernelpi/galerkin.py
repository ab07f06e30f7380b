"""Least-squares Galerkin realization of the policy-evaluation equation.

For a fixed feedback ``mu`` the cost-to-go solves the linear transport
equation ``psi(x)^T grad v(x) = b(x)`` with ``psi = f + g mu`` and
``b = -(Q + mu^T R mu)``.  Restricting trial functions to a span of kernel
sections and minimizing the squared L2 residual over the box yields an
N-by-N symmetric system

    [ integral  Phi(x)^T psi(x) psi(x)^T Phi(x) dx ] alpha
        = integral  Phi(x)^T psi(x) b(x) dx,

where column j of ``Phi(x)`` is the gradient of the j-th kernel section at x.
The integrals are evaluated with a tensor quadrature rule.  The minimum
eigenvalue of the coefficient matrix is the excitation margin: it must be
positive for the discrete problem to determine the coefficients.

Transport operators annihilate constants, so the solution is only pinned up
to an additive constant by the residual; downstream value estimates anchor it
with the equilibrium condition v(0) = 0 (see :func:`anchored_values`).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve, lu_factor, lu_solve

from .dynamics import closed_loop_field, pde_rhs
from .errors import NonFiniteError, PEViolationError
from .kernels import factorize, grad_gram, grad_x
from .native import Approximant


@dataclass(frozen=True)
class GalerkinSystem:
    """Assembled coefficient matrix, right-hand side, and diagnostics.

    ``pe_margin`` is the minimum eigenvalue of the (symmetrized) matrix;
    ``max_eigenvalue`` the largest, so their ratio estimates conditioning.
    ``b_sq`` stores the quadrature value of the squared data term, which
    completes the least-squares objective in :func:`residual_norm`.
    """

    matrix: np.ndarray
    rhs: np.ndarray
    pe_margin: float
    max_eigenvalue: float
    b_sq: float
    n_nodes: int

    @property
    def n(self):
        return self.matrix.shape[0]

    @property
    def condition_estimate(self):
        if self.pe_margin <= 0:
            return float("inf")
        return self.max_eigenvalue / self.pe_margin

    def pe_threshold(self):
        """Relative floor below which the margin is numerically meaningless."""
        return 1e-12 * float(np.trace(self.matrix)) / self.n


def phi_matrix(kernel, centers, x):
    """d-by-N matrix whose column j is the gradient of section j at x."""
    return grad_gram(kernel, np.atleast_2d(x), centers)[0]


def unsym_kernel(kernel, system, policy, y, x):
    """Unsymmetric kernel: the transport operator applied to section y, at x.

    Equals ``grad_x k(x, y) . (f(x) + g(x) mu(x))``; vanishes at x = 0 for
    admissible policies and at x = y for radial kernels.
    """
    return float(grad_x(kernel, x, y) @ closed_loop_field(system, policy, x))


def assemble(kernel, centers, system, policy, cost, rule, rhs_fn=None):
    """Assemble the normal equations of the residual least squares.

    ``rhs_fn``, when given, replaces the cost-derived data with a custom batch
    callable ``(Q, d) -> (Q,)`` evaluated at the quadrature nodes (used by
    manufactured-solution studies).  Raises :class:`NonFiniteError` if any
    node produces a non-finite value.
    """
    nodes, weights = rule.nodes, rule.weights
    psi = np.array([closed_loop_field(system, policy, x) for x in nodes])
    blocks = grad_gram(kernel, nodes, centers)          # (Q, d, N)
    L = np.einsum("qdn,qd->qn", blocks, psi)            # row q: transported sections at node q
    if rhs_fn is None:
        b = np.array([pde_rhs(cost, policy, x) for x in nodes])
    else:
        b = np.asarray(rhs_fn(nodes), dtype=float).ravel()
    if not (np.all(np.isfinite(L)) and np.all(np.isfinite(b)) and np.all(np.isfinite(psi))):
        raise NonFiniteError("assembly produced non-finite values; check policy and dynamics")
    M = (L * weights[:, None]).T @ L
    M = 0.5 * (M + M.T)
    rhs = L.T @ (weights * b)
    eigs = np.linalg.eigvalsh(M)
    return GalerkinSystem(
        matrix=M,
        rhs=rhs,
        pe_margin=float(eigs[0]),
        max_eigenvalue=float(eigs[-1]),
        b_sq=float(weights @ (b * b)),
        n_nodes=len(nodes),
    )


def _sym_solve(M, rhs):
    """Symmetric solve with one step of iterative refinement."""
    try:
        fac = cho_factor(M, lower=True)
        solve = lambda v: cho_solve(fac, v)
    except np.linalg.LinAlgError:
        fac = lu_factor(M)
        solve = lambda v: lu_solve(fac, v)
    alpha = solve(rhs)
    alpha = alpha + solve(rhs - M @ alpha)
    return alpha


def solve_value(gsys, kernel, centers, pe_threshold=None):
    """Coefficients of the residual-minimizing combination of sections.

    Refuses to solve when the excitation margin is at or below the threshold
    (default: the system's relative floor), raising
    :class:`PEViolationError` carrying the measured margin.
    """
    threshold = gsys.pe_threshold() if pe_threshold is None else pe_threshold
    if not gsys.pe_margin > threshold:
        raise PEViolationError(
            f"excitation margin {gsys.pe_margin:.3e} at or below threshold "
            f"{threshold:.3e} for {gsys.n} centers; centers or policy give too "
            "little excitation",
            pe_margin=gsys.pe_margin,
        )
    alpha = _sym_solve(gsys.matrix, gsys.rhs)
    return Approximant(kernel, centers, alpha, factorize(kernel, centers))


def residual_norm(gsys, alpha):
    """Quadrature estimate of the L2 residual norm at coefficients ``alpha``."""
    alpha = np.asarray(alpha, dtype=float).ravel()
    if alpha.size != gsys.n:
        raise ValueError("coefficient length does not match the system")
    q = alpha @ gsys.matrix @ alpha - 2.0 * alpha @ gsys.rhs + gsys.b_sq
    return float(np.sqrt(max(q, 0.0)))


def anchored_values(approximant, x):
    """Value estimate with the equilibrium condition applied: v(x) - v(0).

    The residual objective cannot see additive constants (transport operators
    annihilate them), so the raw combination floats by an arbitrary offset;
    subtracting its value at the origin selects the representative with zero
    cost at the equilibrium.  Gradients, and hence policies, are unaffected.
    """
    origin = np.zeros(approximant.centers.dim)
    return approximant.value(x) - approximant.value(origin)
