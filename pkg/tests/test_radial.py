import math

import numpy as np
import pytest

from conicsphere.conformal import (
    FiniteDifferenceConfig,
    finite_difference_factor,
    schouten_flat,
    sigma_k_curvature,
)
from conicsphere.radial import (
    IntegrationError,
    ProfileCsvError,
    RadialProfile,
    cylinder_rhs,
    first_integral,
    football_profile,
    measured_asymptotics,
    read_profile_csv,
    reconstruct_factor,
    sphere_profile,
    write_profile_csv,
)
from conicsphere.symfunc import in_cone


def _second_difference_richardson(f, t, s=1e-3):
    def d2(step):
        return (f(t + step) - 2.0 * f(t) + f(t - step)) / step ** 2

    return (4.0 * d2(s / 2.0) - d2(s)) / 3.0


class TestCylinderRhs:
    def test_peak_value(self):
        assert cylinder_rhs(0.0, 0.0) == -1.0

    def test_degenerate_slope_rejected(self):
        with pytest.raises(ValueError):
            cylinder_rhs(0.0, 1.0)
        with pytest.raises(ValueError):
            cylinder_rhs(0.0, -1.2)

    def test_closed_form_solution_satisfies_equation(self):
        # h = ln sech t: compare a finite-difference h'' with the right side
        def h(t):
            return math.log(1.0 / math.cosh(t))

        for t in np.linspace(-3.0, 3.0, 13):
            d2h = _second_difference_richardson(h, float(t))
            want = cylinder_rhs(h(float(t)), -math.tanh(float(t)))
            assert abs(d2h - want) < 1e-8

    def test_reduction_against_full_schouten_machinery(self):
        # Local Taylor data (h0, dh0) with h'' from the cylinder equation,
        # lifted to a conformal factor with purely numerical derivative
        # oracles: the curvature must come out 3/2 for arbitrary states, not
        # only along integrated solutions.
        rng = np.random.default_rng(1234)
        for _ in range(10):
            h0 = rng.uniform(-1.0, 0.3)
            dh0 = rng.uniform(-0.9, 0.9)
            t0 = rng.uniform(-1.0, 1.0)
            d2h0 = cylinder_rhs(h0, dh0)

            def u_scalar(x, h0=h0, dh0=dh0, d2h0=d2h0, t0=t0):
                x = np.asarray(x, dtype=float)
                tau = np.log(np.linalg.norm(x, axis=-1)) - t0
                h = h0 + dh0 * tau + 0.5 * d2h0 * tau * tau
                return h - tau - t0

            r0 = math.exp(t0)
            u = finite_difference_factor(
                u_scalar, FiniteDifferenceConfig(step=1e-3 * r0, scheme="richardson"))
            x = np.array([r0, 0.0, 0.0, 0.0])
            assert abs(sigma_k_curvature(u, x, 2) - 1.5) < 1e-5


class TestFirstIntegral:
    def test_sphere_peak(self):
        assert first_integral(0.0, 0.0) == -1.0

    def test_football_peak_closed_form(self):
        for beta in (-0.2, -0.5, -0.8):
            alpha = 1.0 + beta
            h0 = 0.25 * math.log(2 * alpha ** 2 - alpha ** 4)
            want = -(2 * alpha ** 2 - alpha ** 4)
            assert math.isclose(first_integral(h0, 0.0), want, rel_tol=1e-14)

    def test_half_football_value(self):
        alpha = 0.5
        h0 = 0.25 * math.log(2 * alpha ** 2 - alpha ** 4)
        assert math.isclose(first_integral(h0, 0.0), -0.4375, rel_tol=1e-14)


class TestSphereProfile:
    def test_peak(self, sphere):
        i = np.searchsorted(sphere.grid, 0.0)
        assert sphere.grid[i] == 0.0
        assert sphere.h[i] == 0.0
        assert sphere.dh[i] == 0.0

    def test_first_integral_is_minus_one(self, sphere):
        idx = np.linspace(0, sphere.grid.size - 1, 100).astype(int)
        K = first_integral(sphere.h[idx], sphere.dh[idx])
        np.testing.assert_allclose(K, -1.0, rtol=0, atol=1e-12)

    def test_reconstructed_u_matches_closed_form(self, sphere):
        u = reconstruct_factor(sphere)
        for r in np.exp(np.linspace(-10, 10, 25)):
            x = np.array([r, 0.0, 0.0, 0.0])
            want = math.log(2.0 / (1.0 + r * r))
            assert abs(float(u.value_at(x)) - want) < 1e-12


class TestFootballProfile:
    def test_half_order_peak_height(self, football_half):
        i = np.searchsorted(football_half.grid, 0.0)
        want = 0.25 * math.log(0.4375)
        assert abs(football_half.h[i] - want) < 1e-14
        assert football_half.dh[i] == 0.0

    def test_half_order_slopes(self, football_half):
        assert abs(football_half.dh[0] - 0.5) < 1e-6
        assert abs(football_half.dh[-1] + 0.5) < 1e-6

    def test_first_integral_conserved(self, football_half):
        assert football_half.first_integral_drift() < 1e-8

    def test_even_symmetry(self, football_half):
        h = football_half.h
        assert np.max(np.abs(h - h[::-1])) < 1e-8

    def test_order_zero_is_the_sphere(self, sphere):
        p = football_profile(0.0)
        np.testing.assert_array_equal(p.h, sphere.h)
        np.testing.assert_array_equal(p.dh, sphere.dh)

    def test_integrator_matches_closed_form_before_degeneracy(self):
        # beta -> 0 limit: integrating the order-zero peak reproduces
        # ln sech t on a horizon where the slope stays clear of +-1
        from conicsphere.radial import _integrate_half

        t_eval = np.linspace(0.0, 8.0, 801)
        h, dh = _integrate_half(0.0, 8.0, 1e-10, t_eval, guard=1.0 - 1e-8)
        want = np.log(2.0) - np.logaddexp(t_eval, -t_eval)
        assert np.max(np.abs(h - want)) < 1e-5
        assert np.max(np.abs(dh + np.tanh(t_eval))) < 1e-5

    def test_cone_condition_along_profile(self, football_half):
        u = reconstruct_factor(football_half)
        for r in np.exp(np.linspace(-12, 12, 20)):
            A = schouten_flat(u, np.array([0.0, r, 0.0, 0.0]))
            assert in_cone(A, 2)

    def test_argument_validation(self):
        with pytest.raises(ValueError):
            football_profile(0.2)
        with pytest.raises(ValueError):
            football_profile(-1.0)
        with pytest.raises(ValueError):
            football_profile(-0.5, t_max=0.0)
        with pytest.raises(ValueError):
            football_profile(-0.5, tol=-1e-10)

    def test_integration_error_carries_state(self):
        err = IntegrationError("boom", 1.0, -0.5, 0.9)
        assert err.t_last == 1.0 and err.h_last == -0.5 and err.dh_last == 0.9


class TestProfileInvariants:
    def test_grid_must_increase(self):
        t = np.array([0.0, 1.0, 1.0, 2.0])
        with pytest.raises(ValueError):
            RadialProfile(t, np.zeros(4), np.zeros(4), beta=0.0, t_max=2.0)

    def test_cone_condition_enforced(self):
        t = np.linspace(0, 1, 5)
        with pytest.raises(ValueError):
            RadialProfile(t, np.zeros(5), np.full(5, 1.5), beta=0.0, t_max=1.0)


class TestReconstructFactor:
    def test_domain_errors(self, football_half):
        u = reconstruct_factor(football_half)
        with pytest.raises(ValueError):
            u.value_at(np.zeros(4))
        with pytest.raises(ValueError):
            u.value_at(np.array([math.exp(16.0), 0.0, 0.0, 0.0]))
        with pytest.raises(ValueError):
            u.gradient_at(np.array([math.exp(-16.0), 0.0, 0.0, 0.0]))

    def test_sigma2_constant_at_random_radii(self, football_half):
        u = reconstruct_factor(football_half)
        rng = np.random.default_rng(3)
        t_lo, t_hi = football_half.resolvable_window(1e-8)
        for _ in range(20):
            direction = rng.normal(size=4)
            direction /= np.linalg.norm(direction)
            x = math.exp(rng.uniform(t_lo, t_hi)) * direction
            assert abs(sigma_k_curvature(u, x, 2) - 1.5) < 1e-6

    def test_cone_order_asymptotics_near_origin(self, football_half):
        # u - beta ln|x| stays bounded toward the cone point
        u = reconstruct_factor(football_half)
        vals = []
        for t in (-14.0, -12.0, -10.0):
            r = math.exp(t)
            x = np.array([r, 0.0, 0.0, 0.0])
            vals.append(float(u.value_at(x)) - (-0.5) * t)
        assert np.max(np.abs(vals)) < 1.0
        assert np.max(np.abs(np.diff(vals))) < 1e-3


class TestMeasuredAsymptotics:
    def test_half_order(self, football_half):
        asym = measured_asymptotics(football_half)
        assert abs(asym.beta_zero + 0.5) < 1e-6
        assert abs(asym.beta_infinity + 0.5) < 1e-6
        assert abs(asym.mean_curvature_ratio - 3.0) < 1e-6
        assert asym.decay_ok

    def test_sphere(self, sphere):
        asym = measured_asymptotics(sphere)
        assert abs(asym.beta_zero) < 1e-9
        assert abs(asym.beta_infinity) < 1e-9
        assert abs(asym.mean_curvature_ratio - 3.0) < 1e-6

    def test_slow_decay_flagged(self):
        p = football_profile(-0.9, t_max=15.0)
        assert not measured_asymptotics(p, decay_tol=1e-5).decay_ok


class TestProfileCsv:
    def test_round_trip_bit_exact(self, tmp_path, football_half):
        path = tmp_path / "profile.csv"
        write_profile_csv(path, football_half)
        back = read_profile_csv(path)
        np.testing.assert_array_equal(back.grid, football_half.grid)
        np.testing.assert_array_equal(back.h, football_half.h)
        np.testing.assert_array_equal(back.dh, football_half.dh)
        assert abs(back.beta + 0.5) < 1e-6

    def test_write_deterministic(self, tmp_path, football_half):
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_profile_csv(p1, football_half)
        write_profile_csv(p2, football_half)
        assert p1.read_bytes() == p2.read_bytes()

    def test_bad_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b,c,d\n1,2,3,4\n")
        with pytest.raises(ProfileCsvError):
            read_profile_csv(path)

    def test_malformed_row(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("t,h,dh,K\n0.0,0.0,zero,-1.0\n")
        with pytest.raises(ProfileCsvError):
            read_profile_csv(path)

    def test_inconsistent_first_integral_column(self, tmp_path, sphere):
        path = tmp_path / "tampered.csv"
        write_profile_csv(path, sphere)
        lines = path.read_text().splitlines()
        parts = lines[1].split(",")
        parts[3] = "123.0"
        lines[1] = ",".join(parts)
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(ProfileCsvError):
            read_profile_csv(path)
