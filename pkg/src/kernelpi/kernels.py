"""Stationary kernels, Gram matrices, and analytic first derivatives.

The catalog holds the squared-exponential kernel and the Matern family with
smoothness 1/2, 3/2, and 5/2, in the standard machine-learning convention:

    gaussian:  k(r) = s2 * exp(-r^2 / (2 rho^2))
    matern12:  k(r) = s2 * exp(-r / rho)
    matern32:  k(r) = s2 * (1 + sqrt(3) r / rho) exp(-sqrt(3) r / rho)
    matern52:  k(r) = s2 * (1 + sqrt(5) r / rho + 5 r^2 / (3 rho^2)) exp(-sqrt(5) r / rho)

with ``r = ||x - y||``, lengthscale ``rho``, and variance ``s2``.  All four are
symmetric, positive type, and equal ``s2`` on the diagonal.  Every family
except matern12 is twice continuously differentiable, so first partials in the
first argument exist in closed form:

    grad_x k(x, y) = c(r) * (x - y)

for a family-specific radial coefficient ``c(r)`` that stays finite at r = 0.
matern12 has a kink at r = 0 and refuses derivative requests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.spatial.distance import cdist

from .errors import SingularGramError, UnsupportedDerivativeError

FAMILIES = ("gaussian", "matern12", "matern32", "matern52")

_SQRT3 = np.sqrt(3.0)
_SQRT5 = np.sqrt(5.0)

# relative jitter ladder used when a Gram factorization fails outright
JITTER_LADDER = (0.0, 1e-12, 1e-10, 1e-8)


@dataclass(frozen=True)
class Kernel:
    """A stationary kernel from the fixed catalog.

    Parameters
    ----------
    family : str
        One of ``gaussian``, ``matern12``, ``matern32``, ``matern52``.
    lengthscale : float
        Positive range parameter ``rho``.
    variance : float
        Diagonal value ``s2`` (default 1).
    """

    family: str
    lengthscale: float
    variance: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}; choose from {FAMILIES}")
        if not (self.lengthscale > 0 and np.isfinite(self.lengthscale)):
            raise ValueError("lengthscale must be a positive finite number")
        if not (self.variance > 0 and np.isfinite(self.variance)):
            raise ValueError("variance must be a positive finite number")

    @property
    def differentiable(self):
        """Whether first partials are available (all families except matern12)."""
        return self.family != "matern12"


def _value_of_r(kernel, r):
    """Kernel value as a function of pairwise distance (array-safe)."""
    rho, s2 = kernel.lengthscale, kernel.variance
    if kernel.family == "gaussian":
        return s2 * np.exp(-0.5 * (r / rho) ** 2)
    if kernel.family == "matern12":
        return s2 * np.exp(-r / rho)
    if kernel.family == "matern32":
        a = _SQRT3 * r / rho
        return s2 * (1.0 + a) * np.exp(-a)
    a = _SQRT5 * r / rho
    return s2 * (1.0 + a + a * a / 3.0) * np.exp(-a)


def _slope_of_r(kernel, r):
    """Radial coefficient c(r) with grad_x k(x,y) = c(r) (x - y); finite at r=0."""
    rho, s2 = kernel.lengthscale, kernel.variance
    if kernel.family == "gaussian":
        return -_value_of_r(kernel, r) / rho**2
    if kernel.family == "matern32":
        return -(3.0 * s2 / rho**2) * np.exp(-_SQRT3 * r / rho)
    if kernel.family == "matern52":
        a = _SQRT5 * r / rho
        return -(5.0 * s2 / (3.0 * rho**2)) * (1.0 + a) * np.exp(-a)
    raise UnsupportedDerivativeError(
        f"kernel family {kernel.family!r} is not twice differentiable; "
        "no derivative operations are available"
    )


def kernel_eval(kernel, x, y):
    """Kernel value k(x, y) for a single pair of points."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return float(_value_of_r(kernel, np.linalg.norm(x - y)))


def grad_x(kernel, x, y):
    """Gradient of k(., y) at x, from the closed-form radial derivative."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    diff = x - y
    return _slope_of_r(kernel, np.linalg.norm(diff)) * diff


def gram(kernel, X, Y):
    """Cross-Gram matrix with entry (i, j) = k(X_i, Y_j)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    return _value_of_r(kernel, cdist(X, Y))


def grad_gram(kernel, X, centers):
    """Stacked derivative blocks against a center list.

    Returns an array of shape ``(len(X), d, N)`` whose slice ``[q]`` is the
    d-by-N matrix with entry ``(i, j)`` equal to the partial derivative of
    ``k(x_q, c_j)`` in the i-th coordinate of ``x_q``.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    C = np.atleast_2d(np.asarray(getattr(centers, "points", centers), dtype=float))
    diff = X[:, None, :] - C[None, :, :]          # (Q, N, d)
    r = np.sqrt(np.einsum("qnd,qnd->qn", diff, diff))
    return np.swapaxes(_slope_of_r(kernel, r)[..., None] * diff, 1, 2)


@dataclass(frozen=True)
class GramFactorization:
    """Cholesky factorization of a (possibly jittered) center Gram matrix."""

    centers: object
    matrix: np.ndarray
    factor: np.ndarray
    jitter: float

    def solve(self, b):
        """Solve (K + jitter I) x = b using the stored factor."""
        return cho_solve((self.factor, True), np.asarray(b, dtype=float))

    @property
    def n(self):
        return self.matrix.shape[0]


def factorize(kernel, centers, jitter_ladder=JITTER_LADDER):
    """Cholesky-factorize the Gram matrix of a center set.

    Jitter starts at zero and escalates through ``jitter_ladder`` (relative to
    the mean diagonal) until the factorization succeeds; the applied jitter is
    recorded on the result.  Raises :class:`SingularGramError` if even the
    largest jitter fails, which normally means duplicated centers.
    """
    pts = np.atleast_2d(np.asarray(getattr(centers, "points", centers), dtype=float))
    K = gram(kernel, pts, pts)
    K = 0.5 * (K + K.T)
    scale = float(np.mean(np.diag(K)))
    for rel in jitter_ladder:
        jitter = rel * scale
        try:
            factor, _ = cho_factor(K + jitter * np.eye(len(K)), lower=True)
        except np.linalg.LinAlgError:
            continue
        return GramFactorization(centers=centers, matrix=K, factor=factor, jitter=jitter)
    raise SingularGramError(
        f"Gram matrix of {len(K)} centers is singular at maximum jitter "
        f"{jitter_ladder[-1]:g} * mean diagonal; check for duplicate centers"
    )
