"""Kernel evaluations, Gram matrices, analytic gradients, and factorization."""

import numpy as np
import pytest

from kernelpi import (
    Kernel,
    SingularGramError,
    UnsupportedDerivativeError,
    factorize,
    grad_gram,
    grad_x,
    gram,
    kernel_eval,
)
from kernelpi.geometry import CenterSet, grid_centers

ALL_FAMILIES = ["gaussian", "matern12", "matern32", "matern52"]
SMOOTH_FAMILIES = ["gaussian", "matern32", "matern52"]


def fd_gradient(kernel, x, y, step=1e-5):
    """Central finite differences of k(., y) at x; the derivative oracle."""
    out = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = step
        out[i] = (kernel_eval(kernel, x + e, y) - kernel_eval(kernel, x - e, y)) / (2 * step)
    return out


class TestKernelEval:
    def test_gaussian_diagonal_is_variance(self):
        k = Kernel("gaussian", 1.0)
        x = np.array([0.3, -0.7])
        assert kernel_eval(k, x, x) == 1.0

    def test_matern52_at_zero_distance(self):
        k = Kernel("matern52", 1.0)
        x = np.array([0.2, 0.4])
        assert kernel_eval(k, x, x) == 1.0

    def test_gaussian_closed_form_value(self):
        # independent high-precision evaluation of the closed form
        k = Kernel("gaussian", 1.0)
        value = kernel_eval(k, np.array([0.0, 0.0]), np.array([1.0, 0.0]))
        assert value == pytest.approx(np.exp(-0.5), rel=1e-12)
        assert value == pytest.approx(0.606531, abs=1e-6)

    @pytest.mark.parametrize("family", ALL_FAMILIES)
    def test_symmetry_is_exact(self, family, rng):
        k = Kernel(family, 0.7, 2.5)
        for _ in range(25):
            x, y = rng.uniform(-1, 1, (2, 3))
            assert kernel_eval(k, x, y) == kernel_eval(k, y, x)

    @pytest.mark.parametrize("family", ALL_FAMILIES)
    def test_diagonal_equals_variance(self, family, rng):
        k = Kernel(family, 0.7, 1.7)
        for _ in range(10):
            x = rng.uniform(-1, 1, 2)
            assert kernel_eval(k, x, x) == pytest.approx(1.7, rel=0, abs=0)

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            Kernel("laplace", 1.0)
        with pytest.raises(ValueError):
            Kernel("gaussian", -1.0)
        with pytest.raises(ValueError):
            Kernel("gaussian", 1.0, 0.0)


class TestGradX:
    @pytest.mark.parametrize("family", SMOOTH_FAMILIES)
    def test_zero_at_coincident_points(self, family):
        k = Kernel(family, 0.5)
        x = np.array([0.1, -0.2])
        np.testing.assert_array_equal(grad_x(k, x, x), np.zeros(2))

    def test_gaussian_symbolic_oracle(self):
        # symbolic differentiation oracle
        import sympy as sp

        x1, x2, y1, y2 = sp.symbols("x1 x2 y1 y2")
        expr = sp.exp(-((x1 - y1) ** 2 + (x2 - y2) ** 2) / 2)
        subs = {x1: 1, x2: 0, y1: 0, y2: 0}
        expected = np.array([float(sp.diff(expr, v).subs(subs)) for v in (x1, x2)])
        got = grad_x(Kernel("gaussian", 1.0), np.array([1.0, 0.0]), np.zeros(2))
        np.testing.assert_allclose(got, expected, rtol=1e-12)
        np.testing.assert_allclose(got, [-np.exp(-0.5), 0.0], rtol=1e-12)

    def test_matern52_matches_finite_difference(self):
        k = Kernel("matern52", 1.0)
        x, y = np.array([0.5, 0.0]), np.zeros(2)
        analytic = grad_x(k, x, y)
        fd = fd_gradient(k, x, y)
        assert np.linalg.norm(analytic - fd) / np.linalg.norm(analytic) <= 1e-6

    @pytest.mark.parametrize("family", SMOOTH_FAMILIES)
    def test_finite_difference_property(self, family, rng):
        k = Kernel(family, 0.5)
        for _ in range(40):
            x, y = rng.uniform(-1, 1, (2, 2))
            analytic = grad_x(k, x, y)
            fd = fd_gradient(k, x, y)
            rel = np.linalg.norm(analytic - fd) / max(np.linalg.norm(analytic), 1e-12)
            assert rel <= 1e-6

    @pytest.mark.parametrize("family", SMOOTH_FAMILIES)
    def test_antisymmetric_under_swap(self, family, rng):
        k = Kernel(family, 0.5)
        for _ in range(20):
            x, y = rng.uniform(-1, 1, (2, 2))
            np.testing.assert_array_equal(grad_x(k, x, y), -grad_x(k, y, x))

    def test_matern12_refuses(self):
        with pytest.raises(UnsupportedDerivativeError):
            grad_x(Kernel("matern12", 1.0), np.zeros(2), np.ones(2))


class TestGram:
    def test_single_point(self):
        k = Kernel("matern32", 1.0, 2.0)
        K = gram(k, np.zeros((1, 2)), np.zeros((1, 2)))
        np.testing.assert_array_equal(K, [[2.0]])

    def test_coincident_points_rank_one(self):
        k = Kernel("gaussian", 1.0)
        X = np.zeros((2, 2))
        K = gram(k, X, X)
        eigs = np.linalg.eigvalsh(K)
        assert eigs[0] == pytest.approx(0.0, abs=1e-14)
        assert eigs[1] == pytest.approx(2.0, rel=1e-14)

    def test_grid_gram_is_psd(self, box):
        # eigensolver oracle
        k = Kernel("gaussian", 1.0)
        X = box.grid(3)
        eigs = np.linalg.eigvalsh(gram(k, X, X))
        assert eigs[0] >= -1e-12

    @pytest.mark.parametrize("family", ALL_FAMILIES)
    def test_random_gram_psd(self, family, rng, box):
        k = Kernel(family, 0.5)
        X = rng.uniform(-1, 1, (50, 2))
        eigs = np.linalg.eigvalsh(gram(k, X, X))
        assert eigs[0] >= -1e-12 * len(X)


class TestGradGram:
    def test_probe_equals_sole_center(self):
        k = Kernel("matern52", 0.5)
        c = CenterSet(np.array([[0.3, -0.3]]))
        blocks = grad_gram(k, c.points, c)
        np.testing.assert_array_equal(blocks[0], np.zeros((2, 1)))

    def test_columns_are_pointwise_gradients(self):
        k = Kernel("gaussian", 0.5)
        x = np.array([0.1, 0.2])
        centers = CenterSet(np.array([[0.5, 0.5], [-0.4, 0.3]]))
        block = grad_gram(k, x[None, :], centers)[0]
        np.testing.assert_allclose(block[:, 0], grad_x(k, x, centers.points[0]), rtol=1e-14)
        np.testing.assert_allclose(block[:, 1], grad_x(k, x, centers.points[1]), rtol=1e-14)

    def test_entries_match_finite_differences(self, rng):
        k = Kernel("matern52", 0.5)
        centers = CenterSet(rng.uniform(-1, 1, (5, 2)))
        X = rng.uniform(-1, 1, (3, 2))
        blocks = grad_gram(k, X, centers)
        for q, x in enumerate(X):
            for j, c in enumerate(centers.points):
                fd = fd_gradient(k, x, c)
                np.testing.assert_allclose(blocks[q, :, j], fd, rtol=1e-6, atol=1e-9)

    def test_matern12_refuses(self):
        with pytest.raises(UnsupportedDerivativeError):
            grad_gram(Kernel("matern12", 1.0), np.zeros((1, 2)), np.ones((1, 2)))


class TestFactorize:
    def test_single_center(self):
        k = Kernel("gaussian", 1.0, 4.0)
        fact = factorize(k, CenterSet(np.zeros((1, 2))))
        assert fact.jitter == 0.0
        np.testing.assert_allclose(fact.factor[0, 0], 2.0)

    def test_duplicate_centers_use_jitter(self):
        k = Kernel("gaussian", 1.0)
        fact = factorize(k, CenterSet(np.zeros((2, 2))))
        assert fact.jitter > 0.0

    def test_reconstruction_error(self, box):
        # multiply-back oracle
        k = Kernel("matern52", 0.5)
        centers = grid_centers(box, 7)
        fact = factorize(k, centers)
        L = np.tril(fact.factor)
        target = fact.matrix + fact.jitter * np.eye(len(centers))
        rel = np.linalg.norm(L @ L.T - target) / np.linalg.norm(fact.matrix)
        assert rel <= 1e-10

    def test_unfactorizable_raises(self):
        k = Kernel("gaussian", 1.0)
        centers = CenterSet(np.zeros((3, 2)))
        with pytest.raises(SingularGramError):
            factorize(k, centers, jitter_ladder=(0.0,))
