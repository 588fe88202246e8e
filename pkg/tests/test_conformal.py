import math

import numpy as np
import pytest

from conicsphere.conformal import (
    ConformalFactor,
    FiniteDifferenceConfig,
    constant_factor,
    divergence_residual,
    finite_difference_factor,
    linear_factor,
    polynomial_factor,
    round_sphere_factor,
    schouten_flat,
    sigma_k_curvature,
)


def _random_cubic(rng):
    terms = []
    for e0 in range(4):
        for e1 in range(4 - e0):
            for e2 in range(4 - e0 - e1):
                for e3 in range(4 - e0 - e1 - e2):
                    terms.append((rng.uniform(-0.5, 0.5), (e0, e1, e2, e3)))
    return polynomial_factor(terms)


class TestSchoutenFlat:
    def test_constant_factor_is_flat(self):
        u = constant_factor(3.7)
        x = np.array([0.4, -1.0, 0.2, 2.0])
        np.testing.assert_array_equal(schouten_flat(u, x), np.zeros((4, 4)))

    def test_linear_factor_closed_form(self):
        a = np.array([0.3, -0.2, 0.7, 0.1])
        u = linear_factor(a)
        x = np.array([1.0, 2.0, -0.5, 0.0])
        want = np.outer(a, a) - 0.5 * (a @ a) * np.eye(4)
        np.testing.assert_allclose(schouten_flat(u, x), want, rtol=0, atol=1e-15)
        # eigenvalues are |a|^2/2 once and -|a|^2/2 three times
        lam = np.sort(np.linalg.eigvalsh(want))
        aa = a @ a
        np.testing.assert_allclose(lam, [-aa / 2, -aa / 2, -aa / 2, aa / 2],
                                   rtol=1e-12, atol=1e-15)

    def test_round_sphere_metric_eigenvalues(self):
        u = round_sphere_factor()
        rng = np.random.default_rng(8)
        for _ in range(20):
            x = rng.normal(size=4)
            A = schouten_flat(u, x)
            lam = np.linalg.eigvalsh(A) * math.exp(-2.0 * float(u.value_at(x)))
            np.testing.assert_allclose(lam, 0.5 * np.ones(4), rtol=0, atol=1e-12)

    def test_output_exactly_symmetric(self):
        rng = np.random.default_rng(9)
        u = _random_cubic(rng)
        A = schouten_flat(u, rng.normal(size=4))
        np.testing.assert_array_equal(A, A.T)

    def test_singular_point_rejected(self):
        u = ConformalFactor(lambda x: 0.0, lambda x: np.zeros(4),
                            lambda x: np.zeros((4, 4)),
                            singular_points=(np.zeros(4),))
        with pytest.raises(ValueError):
            schouten_flat(u, np.zeros(4))


class TestSigmaKCurvature:
    def test_flat_factor_vanishes(self):
        u = constant_factor(0.0)
        assert sigma_k_curvature(u, np.array([1.0, 0, 0, 0]), 2) == 0.0

    @pytest.mark.parametrize("k,want", [(1, 2.0), (2, 1.5), (3, 0.5), (4, 0.0625)])
    def test_round_sphere_analytic(self, k, want):
        u = round_sphere_factor()
        rng = np.random.default_rng(10 + k)
        for _ in range(100):
            x = rng.normal(size=4) * 1.5
            assert abs(sigma_k_curvature(u, x, k) - want) < 1e-6

    @pytest.mark.parametrize("k,want", [(1, 2.0), (2, 1.5), (3, 0.5), (4, 0.0625)])
    def test_round_sphere_finite_difference(self, k, want):
        cfg = FiniteDifferenceConfig(step=1e-3, scheme="richardson")
        u = finite_difference_factor(round_sphere_factor().value_at, cfg)
        rng = np.random.default_rng(30 + k)
        for _ in range(10):
            x = rng.normal(size=4)
            assert abs(sigma_k_curvature(u, x, k) - want) < 1e-4

    def test_linear_factor_sigma2_vanishes(self):
        a = np.array([0.5, 0.1, -0.3, 0.2])
        u = linear_factor(a)
        x = np.array([0.0, 1.0, 2.0, 3.0])
        assert abs(sigma_k_curvature(u, x, 2)) < 1e-15

    def test_order_range(self):
        with pytest.raises(ValueError):
            sigma_k_curvature(constant_factor(0.0), np.zeros(4), 5)


class TestFiniteDifferenceFactor:
    def test_constant(self):
        u = finite_difference_factor(lambda x: 5.0 * np.ones(np.shape(x)[:-1])
                                     if np.ndim(x) > 1 else 5.0)
        x = np.array([0.3, 0.1, -0.2, 0.9])
        np.testing.assert_allclose(u.gradient_at(x), np.zeros(4), atol=1e-11)
        np.testing.assert_allclose(u.hessian_at(x), np.zeros((4, 4)), atol=1e-9)

    def test_quadratic_hessian_near_exact(self):
        cfg = FiniteDifferenceConfig(step=1e-3, scheme="central")
        u = finite_difference_factor(lambda x: 0.5 * float(np.dot(x, x)), cfg)
        x = np.array([0.2, -0.4, 0.8, 0.1])
        np.testing.assert_allclose(u.hessian_at(x), np.eye(4), rtol=0, atol=1e-8)

    def test_round_sphere_at_origin(self):
        # hand derivative: ln(2/(1+|x|^2)) = ln 2 - |x|^2 + O(|x|^4), so the
        # Hessian at the origin is -2 I
        cfg = FiniteDifferenceConfig(step=1e-3, scheme="richardson")
        u = finite_difference_factor(round_sphere_factor().value_at, cfg)
        x = np.zeros(4)
        np.testing.assert_allclose(u.gradient_at(x), np.zeros(4), atol=1e-10)
        np.testing.assert_allclose(u.hessian_at(x), -2.0 * np.eye(4), rtol=0, atol=1e-6)

    def test_gradient_second_order_consistency(self):
        # halving the step must shrink the gradient error by about 4
        exact = round_sphere_factor()
        x = np.array([0.3, -0.5, 0.2, 0.7])
        errs = []
        for s in (2e-2, 1e-2):
            u = finite_difference_factor(exact.value_at,
                                         FiniteDifferenceConfig(step=s, scheme="central"))
            errs.append(np.max(np.abs(u.gradient_at(x) - exact.gradient_at(x))))
        assert errs[0] / errs[1] > 3.5

    def test_config_validation(self):
        with pytest.raises(ValueError):
            FiniteDifferenceConfig(step=0.0)
        with pytest.raises(ValueError):
            FiniteDifferenceConfig(scheme="forward")


class TestDivergenceResidual:
    def test_zero_factor(self):
        assert divergence_residual(constant_factor(0.0), np.zeros(4)) == 0.0

    def test_random_cubics(self):
        rng = np.random.default_rng(101)
        for _ in range(5):
            u = _random_cubic(rng)
            x = rng.normal(size=4) * 0.4
            assert divergence_residual(u, x) < 1e-5

    def test_round_sphere_point(self):
        u = round_sphere_factor()
        assert divergence_residual(u, np.array([0.3, 0.0, 0.0, 0.0])) < 1e-5

    def test_refinement_order(self):
        rng = np.random.default_rng(102)
        u = _random_cubic(rng)
        x = np.array([0.25, -0.1, 0.3, 0.05])
        res = [divergence_residual(u, x, FiniteDifferenceConfig(step=s, scheme="central"))
               for s in (0.2, 0.1, 0.05)]
        order1 = math.log2(res[0] / res[1])
        order2 = math.log2(res[1] / res[2])
        assert min(order1, order2) >= 2.0
