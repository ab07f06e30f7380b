"""Finite-dimensional approximation in the kernel's function space.

An :class:`Approximant` is a finite combination of kernel sections anchored at
a center set,

    v(x) = sum_j alpha_j k(x, c_j),

evaluable anywhere together with its analytic gradient.  The module also
provides the projected kernel of the span of those sections, the power
function (the pointwise worst-case interpolation error per unit norm), center
interpolation, and the native-space norm of finite combinations.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .geometry import CenterSet
from .kernels import GramFactorization, Kernel, factorize, grad_gram, gram


@dataclass(frozen=True)
class Approximant:
    """Weighted sum of kernel sections with cached Gram factorization."""

    kernel: Kernel
    centers: CenterSet
    coefficients: np.ndarray
    factorization: GramFactorization

    def __post_init__(self):
        coef = np.asarray(self.coefficients, dtype=float).ravel()
        if coef.size != len(self.centers):
            raise ValueError("coefficient count must match center count")
        coef.setflags(write=False)
        object.__setattr__(self, "coefficients", coef)

    def __call__(self, x):
        return self.value(x)

    def value(self, x):
        """Evaluate at a point (d,) -> float, or batch (m, d) -> (m,)."""
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        out = gram(self.kernel, np.atleast_2d(x), self.centers.points) @ self.coefficients
        return float(out[0]) if single else out

    def gradient(self, x):
        """Analytic gradient; (d,) -> (d,), or batch (m, d) -> (m, d)."""
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        blocks = grad_gram(self.kernel, np.atleast_2d(x), self.centers)
        out = np.einsum("qdn,n->qd", blocks, self.coefficients)
        return out[0] if single else out

    def h_norm(self):
        """Native-space norm sqrt(alpha^T K alpha) of the combination."""
        q = self.coefficients @ self.factorization.matrix @ self.coefficients
        return float(np.sqrt(max(q, 0.0)))

    def save_csv(self, path):
        """Write centers and coefficients, with kernel metadata in '#' header lines."""
        k = self.kernel
        with open(path, "w", newline="") as fh:
            fh.write(f"# family={k.family} lengthscale={k.lengthscale!r} "
                     f"variance={k.variance!r} jitter={self.factorization.jitter!r}\n")
            writer = csv.writer(fh)
            writer.writerow([f"x{i + 1}" for i in range(self.centers.dim)] + ["coefficient"])
            for point, coef in zip(self.centers.points, self.coefficients):
                writer.writerow(list(point) + [coef])

    @classmethod
    def load_csv(cls, path):
        with open(path) as fh:
            header = fh.readline()
        if not header.startswith("#"):
            raise ValueError(f"{path} is missing the kernel metadata header")
        meta = dict(item.split("=", 1) for item in header[1:].split())
        kernel = Kernel(meta["family"], float(meta["lengthscale"]), float(meta["variance"]))
        data = np.loadtxt(path, delimiter=",", skiprows=2, ndmin=2)
        centers = CenterSet(data[:, :-1])
        return cls(kernel, centers, data[:, -1], factorize(kernel, centers))


def projected_kernel(kernel, centers, x, y, factorization=None):
    """Reproducing kernel of the span of sections at `centers`, at one pair.

    Computed as ``k_C(x)^T K^{-1} k_C(y)`` through the Cholesky factorization.
    """
    fact = factorization if factorization is not None else factorize(kernel, centers)
    kx = gram(kernel, np.atleast_2d(x), centers.points).ravel()
    ky = gram(kernel, np.atleast_2d(y), centers.points).ravel()
    return float(kx @ fact.solve(ky))


def power_function(kernel, centers, x, factorization=None):
    """Pointwise worst-case interpolation error per unit native-space norm.

    ``sqrt(k(x,x) - k_N(x,x))`` with the argument clamped at zero; the clamp
    only absorbs roundoff near centers, where the true value is 0.  Accepts a
    single point (d,) or a batch (m, d).
    """
    fact = factorization if factorization is not None else factorize(kernel, centers)
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    G = gram(kernel, np.atleast_2d(x), centers.points)
    quad = np.einsum("mn,nm->m", G, fact.solve(G.T))
    p = np.sqrt(np.clip(kernel.variance - quad, 0.0, None))
    return float(p[0]) if single else p


def interpolate(kernel, centers, values):
    """Approximant matching ``values`` at the centers (Gram system solve)."""
    values = np.asarray(values, dtype=float).ravel()
    if values.size != len(centers):
        raise ValueError("value count must match center count")
    fact = factorize(kernel, centers)
    coef = fact.solve(values)
    return Approximant(kernel, centers, coef, fact)


def h_distance(a, b):
    """Native-space norm of the difference of two approximants.

    Both must share the same kernel.  The difference is itself a finite
    combination of sections over the concatenated centers, so its norm is the
    Gram quadratic form over that union; no linear solve is involved.
    """
    if a.kernel != b.kernel:
        raise ValueError("approximants use different kernels")
    union = np.vstack([a.centers.points, b.centers.points])
    delta = np.concatenate([a.coefficients, -b.coefficients])
    q = delta @ gram(a.kernel, union, union) @ delta
    return float(np.sqrt(max(q, 0.0)))


def zero_approximant(kernel, centers):
    """The zero function represented on the given centers."""
    return Approximant(kernel, centers, np.zeros(len(centers)), factorize(kernel, centers))


__all__ = [
    "Approximant",
    "projected_kernel",
    "power_function",
    "interpolate",
    "h_distance",
    "zero_approximant",
]
