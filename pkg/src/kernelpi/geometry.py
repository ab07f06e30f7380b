"""Box domains, center sets, fill distance, and greedy center placement.

The working region is an axis-aligned box.  Center sets are ordered lists of
points inside the box; their order defines the basis indexing used everywhere
else.  The fill distance of a center set (how far the worst point of the box
is from its nearest center) is the geometric quantity that error-decay studies
plot against.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist


def _readonly(a):
    a = np.asarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Domain:
    """Axis-aligned box ``[lower_1, upper_1] x ... x [lower_d, upper_d]``."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = _readonly(np.atleast_1d(self.lower))
        upper = _readonly(np.atleast_1d(self.upper))
        if lower.shape != upper.shape or lower.ndim != 1 or lower.size < 1:
            raise ValueError("lower and upper must be 1-d arrays of equal length")
        if not np.all(lower < upper):
            raise ValueError("lower bound must be strictly below upper bound componentwise")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self):
        return self.lower.size

    @property
    def volume(self):
        return float(np.prod(self.upper - self.lower))

    def contains(self, points, tol=0.0):
        """True per point for membership in the closed box (inflated by tol)."""
        pts = np.atleast_2d(points)
        lo = self.lower - tol
        hi = self.upper + tol
        return np.all((pts >= lo) & (pts <= hi), axis=1)

    def inflate(self, factor):
        """Box scaled about its midpoint by `factor`."""
        mid = 0.5 * (self.lower + self.upper)
        half = 0.5 * (self.upper - self.lower) * factor
        return Domain(mid - half, mid + half)

    def grid(self, n_per_dim):
        """Tensor grid with box endpoints included, row-major ordering.

        ``n_per_dim = 1`` yields the single box midpoint.
        """
        if n_per_dim < 1:
            raise ValueError("n_per_dim must be >= 1")
        axes = []
        for lo, hi in zip(self.lower, self.upper):
            if n_per_dim == 1:
                axes.append(np.array([0.5 * (lo + hi)]))
            else:
                axes.append(np.linspace(lo, hi, n_per_dim))
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def corners(self):
        """All 2^d box corners, row-major in the (lower, upper) choice per axis."""
        d = self.dim
        out = np.empty((2**d, d))
        for i in range(2**d):
            for k in range(d):
                out[i, k] = self.upper[k] if (i >> (d - 1 - k)) & 1 else self.lower[k]
        return out

    def face_midpoints(self):
        """Midpoint of each of the 2d box faces."""
        mid = 0.5 * (self.lower + self.upper)
        out = np.tile(mid, (2 * self.dim, 1))
        for k in range(self.dim):
            out[2 * k, k] = self.lower[k]
            out[2 * k + 1, k] = self.upper[k]
        return out


def unit_box(dim=2, halfwidth=1.0):
    """The default working region ``[-halfwidth, halfwidth]^dim``."""
    return Domain(-halfwidth * np.ones(dim), halfwidth * np.ones(dim))


@dataclass(frozen=True)
class CenterSet:
    """Ordered set of basis centers; the order fixes coefficient indexing."""

    points: np.ndarray = field()

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise ValueError("a center set needs at least one point")
        if not np.all(np.isfinite(pts)):
            raise ValueError("centers must be finite")
        object.__setattr__(self, "points", _readonly(pts))

    def __len__(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]

    def add(self, point):
        """New center set with `point` appended (order preserved)."""
        return CenterSet(np.vstack([self.points, np.atleast_2d(point)]))

    def save_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([f"x{i + 1}" for i in range(self.dim)])
            writer.writerows(self.points.tolist())

    @classmethod
    def load_csv(cls, path):
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(data)


def grid_centers(domain, n_per_dim):
    """Tensor grid of centers over the box, endpoints included."""
    return CenterSet(domain.grid(n_per_dim))


def fill_distance(centers, domain, probe_n=201):
    """Largest distance from a probe-grid point to its nearest center.

    Evaluated over a ``probe_n**d`` tensor grid, so the result is a lower
    bound on the true supremum that converges as the probe refines.
    """
    if probe_n < 2:
        raise ValueError("probe_n must be >= 2")
    probe = domain.grid(probe_n)
    return float(cdist(probe, centers.points).min(axis=1).max())


def greedy_augment(centers, kernel, domain, probe_n=201):
    """Add the probe-grid point where the power function is largest.

    Ties break toward the lowest row-major probe index.  The returned set
    never duplicates an existing center because the power function vanishes
    there and is positive at the maximizer of any nondegenerate configuration.
    """
    from .native import power_function

    probe = domain.grid(probe_n)
    values = power_function(kernel, centers, probe)
    best = int(np.argmax(values))
    return centers.add(probe[best])
