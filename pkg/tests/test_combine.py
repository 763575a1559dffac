import math

import pytest
from scipy import stats

from pacdp import InvalidArgument, PointEstimate, combine, make_rng


def passes(thetas, ws):
    return [PointEstimate(t, w) for t, w in zip(thetas, ws)]


class TestWorkedExample:
    def test_m3_case(self):
        inf = combine(passes([1.0, 2.0, 3.0], [1.0, 1.0, 1.0]), gamma=0.95)
        assert inf.estimate == pytest.approx(2.0, abs=1e-12)
        assert inf.w == pytest.approx(1.0, abs=1e-12)
        assert inf.b == pytest.approx(1.0, abs=1e-12)
        assert inf.total_var == pytest.approx(4.0 / 3.0, abs=1e-12)
        assert inf.df == pytest.approx(32.0, abs=1e-12)

    def test_ci_halfwidth_against_t_oracle(self):
        inf = combine(passes([1.0, 2.0, 3.0], [1.0, 1.0, 1.0]), gamma=0.95)
        half = float(stats.t.ppf(0.975, 32.0)) * math.sqrt(4.0 / 3.0)
        assert inf.ci_upper - inf.estimate == pytest.approx(half, abs=1e-6)
        assert inf.estimate - inf.ci_lower == pytest.approx(half, abs=1e-6)

    def test_p_value_against_t_oracle(self):
        inf = combine(passes([1.0, 2.0, 3.0], [1.0, 1.0, 1.0]))
        stat = 2.0 / math.sqrt(4.0 / 3.0)
        assert inf.p_value == pytest.approx(2 * stats.t.sf(stat, 32.0), abs=1e-10)


class TestRandomizedAgainstDirectRule:
    def test_hundred_cases(self):
        rng = make_rng(2024)
        for _ in range(100):
            m = int(rng.integers(2, 9))
            thetas = rng.standard_normal(m) * 3
            ws = rng.uniform(0.1, 2.0, m)
            inf = combine(passes(thetas, ws), gamma=0.9)
            mean = thetas.mean()
            w = ws.mean()
            b = thetas.var(ddof=1)
            assert inf.estimate == pytest.approx(mean, rel=1e-12)
            assert inf.total_var == pytest.approx(b / m + w, rel=1e-12)
            assert inf.df == pytest.approx((m - 1) * (1 + m * w / b) ** 2, rel=1e-12)
            assert inf.df > m - 1


class TestDegenerateBetween:
    def test_identical_estimates_use_normal_limit(self):
        inf = combine(passes([1.5] * 4, [0.25] * 4), gamma=0.95)
        assert math.isinf(inf.df)
        assert inf.total_var == pytest.approx(0.25)
        half = 1.959963984540054 * 0.5
        assert inf.ci_upper - inf.estimate == pytest.approx(half, abs=1e-9)


class TestProperties:
    def test_shift_equivariance(self):
        rng = make_rng(7)
        thetas = rng.standard_normal(5)
        ws = rng.uniform(0.2, 1.0, 5)
        base = combine(passes(thetas, ws))
        c = 3.7
        shifted = combine(passes(thetas + c, ws), null=c)
        assert shifted.estimate == pytest.approx(base.estimate + c, rel=1e-12)
        assert shifted.ci_lower == pytest.approx(base.ci_lower + c, rel=1e-9)
        assert shifted.ci_upper == pytest.approx(base.ci_upper + c, rel=1e-9)
        assert shifted.p_value == pytest.approx(base.p_value, rel=1e-9)

    def test_permutation_invariance(self):
        thetas = [0.3, -1.2, 2.2, 0.9]
        ws = [0.5, 0.25, 1.0, 0.75]
        a = combine(passes(thetas, ws))
        order = [2, 0, 3, 1]
        b = combine(passes([thetas[i] for i in order], [ws[i] for i in order]))
        assert a.estimate == pytest.approx(b.estimate, abs=1e-15)
        assert a.total_var == pytest.approx(b.total_var, rel=1e-14)

    def test_ci_contains_estimate(self):
        rng = make_rng(8)
        for _ in range(20):
            inf = combine(passes(rng.standard_normal(3), rng.uniform(0.1, 1, 3)))
            assert inf.ci_lower <= inf.estimate <= inf.ci_upper


class TestErrors:
    def test_single_pass_rejected(self):
        with pytest.raises(InvalidArgument):
            combine(passes([1.0], [1.0]))

    def test_negative_within_variance_rejected(self):
        with pytest.raises(InvalidArgument):
            combine(passes([1.0, 2.0], [1.0, -0.5]))

    def test_bad_gamma_rejected(self):
        with pytest.raises(InvalidArgument):
            combine(passes([1.0, 2.0], [1.0, 1.0]), gamma=1.0)
