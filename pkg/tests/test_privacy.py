import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from pacdp import (Flavor, GlobalBounds, InvalidArgument, MechanismSpec,
                   PrivacyBudget, compose, exp_mech_epsilon, gaussian_sanitize,
                   laplace_sanitize, make_rng, split_budget, zcdp_to_approx_dp)
from pacdp.privacy import laplace_noise


class TestBudgetAlgebra:
    def test_split_equal_division(self):
        parts = split_budget(PrivacyBudget.pure(1.2), 6)
        assert len(parts) == 6
        assert all(p.flavor is Flavor.PURE_DP for p in parts)
        assert all(p.value == pytest.approx(0.2, rel=1e-15) for p in parts)

    def test_split_zcdp(self):
        parts = split_budget(PrivacyBudget.zcdp(0.32), 4)
        assert [p.value for p in parts] == [0.08] * 4

    def test_split_identity(self):
        assert split_budget(PrivacyBudget.pure(1.0), 1)[0].value == 1.0

    def test_split_rejects_zero_parts(self):
        with pytest.raises(InvalidArgument):
            split_budget(PrivacyBudget.pure(1.0), 0)

    def test_compose_sums(self):
        total = compose([PrivacyBudget.pure(0.2)] * 6)
        assert total.value == pytest.approx(1.2, abs=1e-15)
        assert compose([PrivacyBudget.zcdp(0.08)] * 2).value == pytest.approx(0.16)

    def test_compose_empty_is_error(self):
        with pytest.raises(InvalidArgument):
            compose([])

    def test_compose_rejects_mixed_flavors(self):
        with pytest.raises(InvalidArgument):
            compose([PrivacyBudget.pure(1.0), PrivacyBudget.zcdp(1.0)])

    @given(value=st.floats(min_value=1e-6, max_value=1e3),
           k=st.integers(min_value=1, max_value=64))
    def test_split_compose_roundtrip_within_one_ulp(self, value, k):
        b = PrivacyBudget.pure(value)
        back = compose(split_budget(b, k))
        assert abs(back.value - b.value) <= math.ulp(b.value)

    def test_negative_value_rejected(self):
        with pytest.raises(InvalidArgument):
            PrivacyBudget.pure(-0.1)


class TestConversion:
    def test_known_values(self):
        assert zcdp_to_approx_dp(0.005, 1e-3) == pytest.approx(0.377, abs=5e-4)
        assert zcdp_to_approx_dp(0.32, 1e-5) == pytest.approx(4.159, abs=5e-4)

    def test_zero_budget_maps_to_zero(self):
        assert zcdp_to_approx_dp(0.0, 0.1) == 0.0

    def test_delta_domain(self):
        for delta in (0.0, 1.0, -0.2, 1.5):
            with pytest.raises(InvalidArgument):
                zcdp_to_approx_dp(0.1, delta)

    @given(st.floats(min_value=1e-6, max_value=10.0),
           st.floats(min_value=1e-6, max_value=10.0),
           st.floats(min_value=1e-8, max_value=0.5))
    def test_monotone_in_rho(self, r1, r2, delta):
        lo, hi = sorted((r1, r2))
        assert zcdp_to_approx_dp(lo, delta) <= zcdp_to_approx_dp(hi, delta)

    @given(st.floats(min_value=1e-6, max_value=10.0),
           st.floats(min_value=1e-8, max_value=0.9),
           st.floats(min_value=1e-8, max_value=0.9))
    def test_decreasing_in_delta(self, rho, d1, d2):
        lo, hi = sorted((d1, d2))
        assert zcdp_to_approx_dp(rho, hi) <= zcdp_to_approx_dp(rho, lo)


class TestExpMechEpsilon:
    def test_pure_identity(self):
        assert exp_mech_epsilon(PrivacyBudget.pure(1.0)) == 1.0

    def test_zcdp_values(self):
        assert exp_mech_epsilon(PrivacyBudget.zcdp(0.08)) == pytest.approx(0.8)
        assert exp_mech_epsilon(PrivacyBudget.zcdp(0.5)) == pytest.approx(2.0)

    def test_zero_budget_rejected(self):
        with pytest.raises(InvalidArgument):
            exp_mech_epsilon(PrivacyBudget.pure(0.0))


class TestMechanisms:
    def test_zero_sensitivity_is_identity(self, rng):
        assert laplace_sanitize(3.25, 0.0, 0.5, rng) == 3.25
        assert gaussian_sanitize(-1.5, 0.0, 0.3, rng) == -1.5

    def test_laplace_rejects_nonpositive_epsilon(self, rng):
        with pytest.raises(InvalidArgument):
            laplace_sanitize(0.0, 1.0, 0.0, rng)

    def test_gaussian_rejects_nonpositive_rho(self, rng):
        with pytest.raises(InvalidArgument):
            gaussian_sanitize(0.0, 1.0, -1.0, rng)

    def test_deterministic_given_stream(self):
        a = laplace_sanitize(0.0, 1.0, 1.0, make_rng(5))
        b = laplace_sanitize(0.0, 1.0, 1.0, make_rng(5))
        assert a == b

    def test_laplace_sd(self, rng):
        draws = laplace_sanitize(np.zeros(10 ** 6), 1.0, 0.5, rng)
        assert draws.std() == pytest.approx(math.sqrt(2.0) / 0.5, rel=0.02)

    def test_gaussian_sd(self, rng):
        draws = gaussian_sanitize(np.zeros(10 ** 6), 1.0, 0.005, rng)
        assert draws.std() == pytest.approx(10.0, rel=0.02)

    def test_noise_is_mean_zero(self, rng):
        n = 10 ** 6
        lap = laplace_sanitize(np.zeros(n), 1.0, 1.0, rng)
        sd = math.sqrt(2.0)
        assert abs(lap.mean()) < 4.0 * sd / math.sqrt(n)
        gau = gaussian_sanitize(np.zeros(n), 1.0, 0.5, rng)
        assert abs(gau.mean()) < 4.0 / math.sqrt(n)

    def test_laplace_matches_analytic_cdf(self, rng):
        scale = 2.0
        draws = laplace_noise(scale, rng, size=10 ** 5)

        def cdf(x):
            x = np.asarray(x) / scale
            return np.where(x < 0, 0.5 * np.exp(x), 1.0 - 0.5 * np.exp(-x))

        res = stats.kstest(draws, cdf)
        assert res.pvalue > 1e-3

    def test_mechanism_spec_dispatch(self, rng):
        lap = MechanismSpec(1.0, PrivacyBudget.pure(1e6)).sanitize(2.0, rng)
        gau = MechanismSpec(1.0, PrivacyBudget.zcdp(1e6)).sanitize(2.0, rng)
        assert lap == pytest.approx(2.0, abs=1e-3)
        assert gau == pytest.approx(2.0, abs=1e-2)
        with pytest.raises(InvalidArgument):
            MechanismSpec(1.0, PrivacyBudget.pure(0.0)).sanitize(2.0, rng)


class TestGlobalBounds:
    def test_ordering_enforced(self):
        with pytest.raises(InvalidArgument):
            GlobalBounds(1.0, 1.0)

    def test_contains(self):
        b = GlobalBounds(-1.0, 2.0)
        assert b.contains([-1.0, 0.0, 2.0])
        assert not b.contains([2.5])
        assert b.width == 3.0


class TestStreams:
    def test_distinct_paths_are_independent(self):
        a = make_rng(1, 0).random(4)
        b = make_rng(1, 1).random(4)
        assert not np.allclose(a, b)

    def test_same_path_reproduces(self):
        assert np.array_equal(make_rng(9, 2, 3).random(8), make_rng(9, 2, 3).random(8))
