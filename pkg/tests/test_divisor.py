import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conicsphere.divisor import (
    CRITICAL,
    SUBCRITICAL,
    SUPERCRITICAL,
    Classification,
    ConicDivisor,
    beta_tilde,
    classify,
    defect,
    football_invariant,
    gbc_total,
    reflection_identity_gap,
)

_cone_orders = st.floats(min_value=-0.999, max_value=-0.001)


class TestDefect:
    def test_smooth_point(self):
        assert defect(0.0) == 0.0

    def test_endpoint(self):
        assert math.isclose(defect(-1.0), 1.0, rel_tol=1e-15)

    def test_half(self):
        assert math.isclose(defect(-0.5), 0.3125, rel_tol=1e-15)

    def test_matches_dimension_four_closed_form(self):
        for b in np.linspace(-1.0, 0.0, 101):
            want = (b ** 3 + 3.0 * b ** 2) / 2.0
            assert math.isclose(defect(float(b)), want, rel_tol=1e-13, abs_tol=1e-15)

    def test_dimension_two_is_absolute_value(self):
        for b in (-0.25, -0.5, -0.75):
            assert math.isclose(defect(b, n=2), -b, rel_tol=1e-15)

    def test_monotone_in_magnitude(self):
        grid = np.linspace(0.0, -1.0, 200)
        vals = [defect(float(b)) for b in grid]
        assert all(v2 > v1 for v1, v2 in zip(vals, vals[1:]))

    def test_domain(self):
        with pytest.raises(ValueError):
            defect(-1.2)
        with pytest.raises(ValueError):
            defect(0.1)
        with pytest.raises(ValueError):
            defect(-0.5, n=3)


class TestGbcTotal:
    def test_empty_divisor(self):
        assert gbc_total(ConicDivisor(())) == 2.0

    def test_two_half_cones(self):
        assert math.isclose(gbc_total(ConicDivisor((-0.5, -0.5))), 1.375, rel_tol=1e-15)

    def test_single_half_cone(self):
        assert math.isclose(gbc_total(ConicDivisor((-0.5,))), 1.6875, rel_tol=1e-15)

    def test_decreases_with_cone_strength(self):
        v1 = gbc_total(ConicDivisor((-0.3,)))
        v2 = gbc_total(ConicDivisor((-0.6,)))
        assert v2 < v1 < 2.0


class TestReflectionIdentity:
    @pytest.mark.parametrize("beta", [-1.0, 0.0, -0.3])
    def test_examples(self, beta):
        assert reflection_identity_gap(beta) <= 1e-12

    def test_grid(self):
        gaps = [reflection_identity_gap(float(b)) for b in np.linspace(-1.0, 0.0, 1000)]
        assert max(gaps) <= 1e-12


class TestBetaTilde:
    def test_pair(self):
        assert math.isclose(beta_tilde(ConicDivisor((-0.5, -0.5)), 1), -0.5, rel_tol=1e-15)

    def test_single_point_empty_sum(self):
        assert beta_tilde(ConicDivisor((-0.5,)), 1) == 0.0

    def test_triple(self):
        d = ConicDivisor((-0.3, -0.4, -0.5))
        want = -((0.3 ** 3 + 0.4 ** 3) ** (1.0 / 3.0))
        assert math.isclose(beta_tilde(d, 3), want, rel_tol=1e-12)

    def test_index_range(self):
        with pytest.raises(ValueError):
            beta_tilde(ConicDivisor((-0.5,)), 2)


class TestClassify:
    def test_unequal_pair_supercritical(self):
        c = classify(ConicDivisor((-0.3, -0.6)))
        assert c.kind == SUPERCRITICAL
        assert c.witness_index == 2
        assert abs(c.lhs - 0.2646) < 1e-12
        assert abs(c.rhs - 0.0975375) < 1e-12

    def test_single_point_supercritical(self):
        c = classify(ConicDivisor((-0.5,)))
        assert c.kind == SUPERCRITICAL
        assert c.witness_index == 1
        assert abs(c.lhs - 0.2109375) < 1e-12
        assert c.rhs == 0.0

    @settings(max_examples=50, deadline=None)
    @given(_cone_orders)
    def test_equal_pair_critical_exactly(self, b):
        c = classify(ConicDivisor((b, b)), eps=0.0)
        assert c.kind == CRITICAL
        assert c.lhs == c.rhs

    @settings(max_examples=50, deadline=None)
    @given(_cone_orders, _cone_orders)
    def test_unequal_pairs_supercritical(self, b1, b2):
        if b1 == b2:
            return
        assert classify(ConicDivisor((b1, b2))).kind == SUPERCRITICAL

    def test_permutation_invariance(self):
        rng = np.random.default_rng(17)
        for _ in range(50):
            q = int(rng.integers(2, 6))
            betas = tuple(rng.uniform(-0.9, -0.1, size=q))
            base = classify(ConicDivisor(betas))
            perm = tuple(np.array(betas)[rng.permutation(q)])
            other = classify(ConicDivisor(perm))
            assert base.kind == other.kind
            if base.witness_index is not None:
                assert betas[base.witness_index - 1] == perm[other.witness_index - 1]

    def test_empty_divisor_rejected(self):
        with pytest.raises(ValueError):
            classify(ConicDivisor(()))

    def test_negative_eps_rejected(self):
        with pytest.raises(ValueError):
            classify(ConicDivisor((-0.5,)), eps=-1.0)

    def test_subcritical_witness_absent(self):
        # three nearly equal orders: each comparison has the extra positive
        # term on the right, so all indices satisfy the strict inequality
        c = classify(ConicDivisor((-0.5, -0.5, -0.5)))
        assert c.kind == SUBCRITICAL
        assert c.witness_index is None
        assert isinstance(c, Classification)


class TestFootballInvariant:
    def test_values(self):
        assert football_invariant(0.0) == 0.0
        assert football_invariant(-0.5) == 0.140625
        assert football_invariant(-1.0) == 0.25

    def test_domain(self):
        with pytest.raises(ValueError):
            football_invariant(0.5)


class TestConicDivisor:
    def test_validation(self):
        with pytest.raises(ValueError):
            ConicDivisor((-1.5,))
        with pytest.raises(ValueError):
            ConicDivisor((0.0,))
        with pytest.raises(ValueError):
            ConicDivisor((), includes_infinity=True)

    def test_len(self):
        assert len(ConicDivisor((-0.1, -0.2))) == 2
