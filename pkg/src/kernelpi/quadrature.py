"""Tensor-product Gauss-Legendre quadrature over a box domain."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteError


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and positive weights of a quadrature rule on a box."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        nodes = np.atleast_2d(np.asarray(self.nodes, dtype=float))
        weights = np.asarray(self.weights, dtype=float).ravel()
        if len(nodes) != len(weights):
            raise ValueError("node and weight counts differ")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return len(self.weights)


def gauss_legendre_tensor(domain, order):
    """Tensor product of 1-d Gauss-Legendre rules mapped onto the box.

    The rule has ``order**d`` nodes in row-major order and integrates
    per-axis polynomials up to degree ``2*order - 1`` exactly.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    x, w = np.polynomial.legendre.leggauss(order)
    axes, wts = [], []
    for lo, hi in zip(domain.lower, domain.upper):
        axes.append(0.5 * (hi - lo) * x + 0.5 * (hi + lo))
        wts.append(0.5 * (hi - lo) * w)
    node_mesh = np.meshgrid(*axes, indexing="ij")
    weight_mesh = np.meshgrid(*wts, indexing="ij")
    nodes = np.stack([m.ravel() for m in node_mesh], axis=1)
    weights = np.prod(np.stack([m.ravel() for m in weight_mesh], axis=1), axis=1)
    return QuadratureRule(nodes=nodes, weights=weights)


def integrate(fn, rule):
    """Weighted sum of ``fn`` over the rule's nodes.

    ``fn`` is called once per node with a single point.  Summation uses
    numpy's fixed pairwise reduction over ascending node index, so repeated
    runs are bit-identical.  Raises :class:`NonFiniteError` if the integrand
    produces a NaN or Inf at any node.
    """
    values = np.array([fn(x) for x in rule.nodes], dtype=float)
    if not np.all(np.isfinite(values)):
        bad = int(np.flatnonzero(~np.isfinite(values))[0])
        raise NonFiniteError(f"integrand is not finite at node {bad}: {rule.nodes[bad]}")
    return float(np.dot(rule.weights, values))
