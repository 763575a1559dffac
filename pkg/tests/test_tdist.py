"""The in-repo t distribution against scipy as the external oracle."""

import math

import numpy as np
import pytest
from scipy import stats

from pacdp._tdist import betainc_reg, normal_ppf, t_cdf, t_ppf, t_sf
from pacdp.errors import InvalidArgument

DFS = [1.0, 2.0, 2.5, 7.3, 12.0, 31.99, 32.0, 100.4, 1000.0, 12345.6]
PROBS = [1e-8, 1e-4, 0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.975, 0.999, 1 - 1e-6]


def test_cdf_matches_scipy_to_1e10():
    xs = np.concatenate([np.linspace(-30, 30, 121), [-1e4, 1e4]])
    for df in DFS:
        ref = stats.t.cdf(xs, df)
        got = np.array([t_cdf(float(x), df) for x in xs])
        assert np.max(np.abs(got - ref)) < 1e-10


def test_ppf_matches_scipy_to_1e10():
    for df in DFS:
        for p in PROBS:
            ref = float(stats.t.ppf(p, df))
            got = t_ppf(p, df)
            assert abs(got - ref) <= 1e-10 * max(1.0, abs(ref)), (p, df, got, ref)


def test_infinite_df_is_normal():
    for p in PROBS:
        assert t_ppf(p, math.inf) == pytest.approx(stats.norm.ppf(p), abs=1e-10)
    assert t_cdf(1.5, math.inf) == pytest.approx(stats.norm.cdf(1.5), abs=1e-12)


def test_normal_ppf_roundtrip():
    for p in PROBS:
        x = normal_ppf(p)
        assert 0.5 * math.erfc(-x / math.sqrt(2)) == pytest.approx(p, rel=1e-12)


def test_sf_symmetry():
    assert t_sf(1.2, 7.0) == pytest.approx(t_cdf(-1.2, 7.0), abs=1e-15)


def test_betainc_matches_scipy():
    from scipy.special import betainc
    for a in (0.5, 1.5, 16.0, 250.0):
        for b in (0.5, 2.0, 9.0):
            for x in (1e-6, 0.2, 0.5, 0.9, 1 - 1e-6):
                assert betainc_reg(a, b, x) == pytest.approx(
                    float(betainc(a, b, x)), abs=1e-12)


def test_domain_errors():
    with pytest.raises(InvalidArgument):
        t_ppf(0.0, 5.0)
    with pytest.raises(InvalidArgument):
        t_ppf(0.5, -1.0)
    with pytest.raises(InvalidArgument):
        t_cdf(0.5, 0.0)
