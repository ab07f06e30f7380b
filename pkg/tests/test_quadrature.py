"""Tensor Gauss-Legendre rules over boxes."""

import numpy as np
import pytest

from kernelpi import NonFiniteError, gauss_legendre_tensor, integrate, unit_box


class TestRuleConstruction:
    def test_order_one_is_midpoint(self, box):
        rule = gauss_legendre_tensor(box, 1)
        assert len(rule) == 1
        np.testing.assert_allclose(rule.nodes[0], [0.0, 0.0], atol=1e-15)
        assert rule.weights[0] == pytest.approx(4.0)

    @pytest.mark.parametrize("order", [1, 2, 5, 40])
    def test_weights_sum_to_volume(self, box, order):
        rule = gauss_legendre_tensor(box, order)
        assert rule.weights.sum() == pytest.approx(box.volume, rel=1e-10)
        assert len(rule) == order**2

    def test_invalid_order(self, box):
        with pytest.raises(ValueError):
            gauss_legendre_tensor(box, 0)


class TestIntegrate:
    def test_zero_function(self, box):
        rule = gauss_legendre_tensor(box, 4)
        assert integrate(lambda x: 0.0, rule) == 0.0

    def test_quadratic_moment(self, box):
        rule = gauss_legendre_tensor(box, 2)
        value = integrate(lambda x: x[0] ** 2, rule)
        assert value == pytest.approx(4.0 / 3.0, rel=1e-13)

    def test_odd_symmetry(self, box):
        rule = gauss_legendre_tensor(box, 12)
        assert abs(integrate(lambda x: x[0] * x[1], rule)) <= 1e-14

    @pytest.mark.parametrize("order,degree", [(2, 3), (3, 5), (5, 9)])
    def test_polynomial_exactness(self, box, order, degree):
        # exact per-axis up to degree 2*order - 1; closed-form antiderivative
        # oracle: x1^degree integrates to 0 (odd), x2^(degree-1) to 4/degree
        rule = gauss_legendre_tensor(box, order)
        value = integrate(lambda x: x[0] ** degree + x[1] ** (degree - 1), rule)
        assert value == pytest.approx(4.0 / degree, abs=1e-12)

    def test_smooth_refinement(self, box):
        # refinement oracle: order 40 against an order-80 reference
        fn = lambda x: np.exp(-(x[0] ** 2 + x[1] ** 2))
        coarse = integrate(fn, gauss_legendre_tensor(box, 40))
        fine = integrate(fn, gauss_legendre_tensor(box, 80))
        assert coarse == pytest.approx(fine, abs=1e-12)

    def test_doubling_order_is_stable(self, box):
        fn = lambda x: np.cos(2 * x[0]) * np.exp(x[1])
        a = integrate(fn, gauss_legendre_tensor(box, 20))
        b = integrate(fn, gauss_legendre_tensor(box, 40))
        assert abs(a - b) <= 1e-10 * abs(b)

    def test_nonfinite_integrand_raises(self, box):
        rule = gauss_legendre_tensor(box, 2)
        with pytest.raises(NonFiniteError):
            integrate(lambda x: np.inf, rule)
