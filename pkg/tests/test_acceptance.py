"""Acceptance gate: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s`.  Every tolerance is fixed
here; nothing is calibrated at runtime.
"""

import json
import os
import pathlib
import subprocess
import sys
import time

import numpy as np
import pytest

from pacdp import (GlobalBounds, Inference, McmcConfig, Method, MethodSpec,
                   PointEstimate, PrivacyBudget, ScenarioConfig, ZilnModel,
                   censor, combine, estimate_pac, gaussian_sanitize,
                   laplace_sanitize, make_rng, mle_censored,
                   nonprivate_censored_mle, partition_and_difference,
                   private_quantile, run_scenario, trimmed_stats,
                   winsorized_stats, zcdp_to_approx_dp)
from pacdp.likelihood import CensoredStats
from pacdp.quantile import QuantileRequest
from pacdp.simulate import GaussianModel

from conftest import batch_means_se
from test_estimators import (_mh_draws, grid_search_mle,
                             loop_oracle_wins_trim, quadrature_posterior_mean,
                             random_stats)

REPO = pathlib.Path(__file__).resolve().parent.parent

# privacy-loss grid with the zCDP-implied epsilon at delta = 1/n,
# for n = 1e3, 1e5, 1e6 (three decimals)
RHO_GRID = (0.005, 0.02, 0.08, 0.32, 1.28)
EPS_BY_DELTA = {
    1e-3: (0.377, 0.763, 1.567, 3.294, 7.227),
    1e-5: (0.485, 0.980, 1.999, 4.159, 8.958),
    1e-6: (0.531, 1.071, 2.183, 4.525, 9.690),
}
# mechanism noise SDs per unit sensitivity
LAPLACE_SD = {0.5: 2.828, 1.0: 1.414, 2.0: 0.707, 5.0: 0.283, 10.0: 0.141}
GAUSSIAN_SD = {0.005: 10.0, 0.02: 5.0, 0.08: 2.5, 0.32: 1.25, 1.28: 0.625}


def _report(n, text):
    print(f"\n[acceptance] criterion {n}: PASS  ({text})")


def test_criterion_01_conversion_golden_values():
    t0 = time.time()
    for delta, expected in EPS_BY_DELTA.items():
        for rho, eps in zip(RHO_GRID, expected):
            assert round(zcdp_to_approx_dp(rho, delta), 3) == pytest.approx(
                eps, abs=5e-4), (rho, delta)
    elapsed = time.time() - t0
    assert elapsed < 1.0
    _report(1, f"15 conversion values to 3 d.p. in {elapsed:.3f}s")


def test_criterion_02_noise_calibration():
    t0 = time.time()
    n = 10 ** 6
    for i, (eps, sd) in enumerate(LAPLACE_SD.items()):
        draws = laplace_sanitize(np.zeros(n), 1.0, eps, make_rng(2001, i))
        assert draws.std() == pytest.approx(sd, rel=0.02), eps
    for i, (rho, sd) in enumerate(GAUSSIAN_SD.items()):
        draws = gaussian_sanitize(np.zeros(n), 1.0, rho, make_rng(2002, i))
        assert draws.std() == pytest.approx(sd, rel=0.02), rho
    elapsed = time.time() - t0
    assert elapsed < 30.0
    _report(2, f"10 empirical noise SDs within 2% in {elapsed:.1f}s")


def test_criterion_03_combination_rule():
    inf = combine([PointEstimate(1.0, 1.0), PointEstimate(2.0, 1.0),
                   PointEstimate(3.0, 1.0)])
    assert abs(inf.estimate - 2.0) < 1e-12
    assert abs(inf.total_var - 4.0 / 3.0) < 1e-12
    assert abs(inf.df - 32.0) < 1e-12
    rng = make_rng(2003)
    for _ in range(100):
        m = int(rng.integers(2, 10))
        thetas = rng.standard_normal(m) * 2
        ws = rng.uniform(0.05, 3.0, m)
        inf = combine([PointEstimate(t, w) for t, w in zip(thetas, ws)])
        mean = thetas.sum() / m
        w = ws.sum() / m
        b = ((thetas - mean) ** 2).sum() / (m - 1)
        assert inf.estimate == pytest.approx(mean, rel=1e-12)
        assert inf.total_var == pytest.approx(b / m + w, rel=1e-12)
        assert inf.df == pytest.approx((m - 1) * (1 + m * w / b) ** 2, rel=1e-12)
    _report(3, "worked m=3 case to 1e-12 and 100 random re-evaluations")


def test_criterion_04_derivative_fidelity():
    from pacdp import censored_loglik, censored_loglik_d2theta, censored_loglik_dtheta
    t0 = time.time()
    rng = make_rng(2004)
    worst_g = worst_h = 0.0
    for _ in range(100):
        stats = random_stats(rng)
        theta = float(rng.uniform(stats.lower - 0.5, stats.upper + 0.5))
        sigma2 = float(rng.uniform(0.05, 4.0))
        h = 1e-6 * (1.0 + abs(theta))
        fd_g = (censored_loglik(theta + h, sigma2, stats)
                - censored_loglik(theta - h, sigma2, stats)) / (2 * h)
        g = censored_loglik_dtheta(theta, sigma2, stats)
        worst_g = max(worst_g, abs(g - fd_g) / max(abs(g), 1e-8))
        h2 = 1e-5 * (1.0 + abs(theta))
        fd_h = (censored_loglik_dtheta(theta + h2, sigma2, stats)
                - censored_loglik_dtheta(theta - h2, sigma2, stats)) / (2 * h2)
        hh = censored_loglik_d2theta(theta, sigma2, stats)
        worst_h = max(worst_h, abs(hh - fd_h) / max(abs(hh), 1e-8))
    elapsed = time.time() - t0
    assert worst_g < 1e-6 and worst_h < 1e-6
    assert elapsed < 5.0
    _report(4, f"gradient rel err {worst_g:.2e}, hessian rel err {worst_h:.2e} "
               f"in {elapsed:.1f}s")


def test_criterion_05_oracle_equivalence():
    t0 = time.time()
    rng = make_rng(2005)
    worst = 0.0
    for _ in range(20):
        stats = random_stats(rng)
        est = mle_censored(stats)
        t_grid, _ = grid_search_mle(stats)
        worst = max(worst, abs(est.theta - t_grid))
    assert worst < 1e-3
    cases = [
        CensoredStats(-1.0, 1.2, 3.1, 2.4, 4.0, 3.0, 30),
        CensoredStats(-0.5, 0.5, 0.0, 1.5, 6.0, 6.0, 40),
        CensoredStats(-2.0, 1.0, -8.0, 9.0, 2.0, 5.0, 25),
        CensoredStats(0.0, 2.5, 30.0, 55.0, 3.0, 2.0, 50),
        CensoredStats(-3.0, -0.5, -30.0, 55.0, 5.0, 1.0, 35),
    ]
    cfg = McmcConfig(iterations=60_000, burn_in=10_000)
    for i, stats in enumerate(cases):
        draws = _mh_draws(stats, cfg, make_rng(2015, i))
        se = batch_means_se(draws)
        ref = quadrature_posterior_mean(stats)
        assert abs(draws.mean() - ref) <= 3 * se, (i, draws.mean(), ref, se)
    elapsed = time.time() - t0
    assert elapsed < 120.0
    _report(5, f"MLE vs grid search worst {worst:.2e}; 5 posterior means "
               f"within 3 MC SEs of quadrature in {elapsed:.1f}s")


def test_criterion_06_winsorized_trimmed_exactness():
    rng = make_rng(2006)
    done = 0
    while done < 100:
        z = rng.standard_normal(int(rng.integers(10, 120))) * float(rng.uniform(0.5, 4))
        lo, hi = np.quantile(z, [0.12, 0.88])
        if not lo < hi:
            continue
        d = censor(z, float(lo), float(hi), 0.12, 0.12)
        if d.n_inner < 2:
            continue
        tw, vw = winsorized_stats(d)
        tt, vt = trimmed_stats(d)
        ow, ovw, ot, ovt = loop_oracle_wins_trim(d)
        assert tw == pytest.approx(ow, rel=1e-12)
        assert vw == pytest.approx(ovw, rel=1e-12)
        assert tt == pytest.approx(ot, rel=1e-12)
        assert vt == pytest.approx(ovt, rel=1e-12)
        n, n_in = d.n_parts, d.n_inner
        assert vt / vw == pytest.approx(n * (n_in - 1) / (n_in * (n - 1)),
                                        rel=1e-12)
        done += 1
    _report(6, "100 instances match the loop oracle to 1e-12; "
               "variance-ratio identity exact")


@pytest.fixture(scope="module")
def desk_scale_rows():
    cfg = ScenarioConfig(
        name="acceptance", model=ZilnModel(0.02, 0.02, 4.6, 4.6, 1.0),
        n=100_000, n_parts=100, alpha=0.1, beta=0.1,
        methods=((Method.FOUR_STAT, Inference.BAYES),
                 (Method.NAIVE, Inference.MLE)),
        budgets=(PrivacyBudget.pure(2.0), PrivacyBudget.pure(50.0)),
        m=4, repeats=300, seed=20240601)
    t0 = time.time()
    rows = run_scenario(cfg)
    return rows, time.time() - t0


def test_criterion_07_desk_scale_validity(desk_scale_rows):
    rows, elapsed = desk_scale_rows
    r = next(x for x in rows if x.method == "4s" and x.budget == 2.0)
    assert r.repeats == 300 and r.failures == 0
    assert 0.915 <= r.coverage <= 0.985, r
    assert abs(r.bias) < r.rmse / 3.0, r
    assert elapsed < 900.0
    _report(7, f"4s coverage {r.coverage:.3f} in [0.915, 0.985], "
               f"|bias| {abs(r.bias):.4f} < rmse/3 {r.rmse / 3:.4f}; "
               f"scenario ran in {elapsed:.0f}s")


def test_criterion_08_high_budget_convergence():
    model = GaussianModel(3.32, 3.32, 6.0)
    bounds = GlobalBounds(-50.0, 50.0)
    spec = MethodSpec(Method.FOUR_STAT, 0.1, 0.1, bounds, PrivacyBudget.pure(50.0))
    diffs = []
    for r in range(100):
        dr = make_rng(2008, r, 0)
        y1 = model.draw(100_000, 1, dr)
        y0 = model.draw(100_000, 0, dr)
        z = partition_and_difference(y1, y0, 100, make_rng(2008, r, 1))
        est = estimate_pac(z, spec, make_rng(2008, r, 2))
        ref = nonprivate_censored_mle(z, 0.1, 0.1)
        diffs.append(abs(est.theta - ref.theta))
    mean_diff = float(np.mean(diffs))
    assert mean_diff < 0.01
    _report(8, f"mean |private - noise-free| = {mean_diff:.4f} < 0.01 "
               f"over 100 runs")


def test_criterion_09_consistency_trends():
    # quantile release: MSE to the population median falls as P grows
    bounds = GlobalBounds(-10.0, 10.0)
    budget = PrivacyBudget.pure(1.0)
    q_mses = []
    for pi, n in enumerate((250, 1000, 4000)):
        errs = []
        for rep in range(500):
            r = make_rng(2009, pi, rep)
            z = r.standard_normal(n)
            out = private_quantile(z, QuantileRequest(0.5, bounds, budget), r)
            errs.append(out * out)
        q_mses.append(float(np.mean(errs)))
    assert q_mses[0] > q_mses[1] > q_mses[2], q_mses

    # likelihood release: MSE falls as the budget grows
    e_mses = []
    for eps in (0.5, 2.0, 50.0):
        cfg = ScenarioConfig(
            name="trend", model=ZilnModel(0.02, 0.02, 4.6, 4.6, 1.0),
            n=100_000, n_parts=100, alpha=0.1, beta=0.1,
            methods=((Method.FOUR_STAT, Inference.MLE),),
            budgets=(PrivacyBudget.pure(eps),), m=4, repeats=200, seed=2019)
        r = next(x for x in run_scenario(cfg) if x.method == "4s")
        e_mses.append(r.rmse ** 2)
    assert e_mses[0] > e_mses[1] > e_mses[2], e_mses
    _report(9, f"quantile MSE {q_mses} falls in P; "
               f"4s MSE {[round(m, 4) for m in e_mses]} falls in budget")


def test_criterion_10_negative_control(desk_scale_rows):
    rows, _ = desk_scale_rows
    r = next(x for x in rows if x.method == "naive" and x.budget == 50.0)
    assert r.repeats == 300
    assert r.coverage < 0.90, r
    _report(10, f"naive coverage {r.coverage:.3f} < 0.90 at high budget")


def test_criterion_11_simulate_determinism(tmp_path):
    cfg = tmp_path / "determinism.json"
    cfg.write_text(json.dumps({"scenarios": [{
        "name": "det",
        "data": {"kind": "ziln", "p0": 0.05, "p1": 0.05, "mu0": 2.0,
                 "mu1": 2.0, "sigma": 1.0},
        "n": 2000, "P": 20, "alpha": 0.1, "beta": 0.1,
        "methods": [{"method": "4s", "inference": "bayes"}, "winsorized"],
        "budgets": [{"flavor": "pure_dp", "value": 2.0},
                    {"flavor": "zcdp", "value": 0.32}],
        "m": 3, "repeats": 10, "seed": 2011,
        "mcmc": {"iterations": 2000, "burn_in": 500}}]}))
    outputs = []
    for threads in ("1", "3", "1"):
        env = dict(os.environ, PACDP_THREADS=threads)
        res = subprocess.run(
            [sys.executable, "-m", "pacdp.cli", "simulate", "--config", str(cfg)],
            capture_output=True, text=True, cwd=REPO, env=env)
        assert res.returncode == 0, res.stderr
        outputs.append(res.stdout)
    assert outputs[0] == outputs[1] == outputs[2]
    _report(11, "byte-identical metrics across reruns, serial vs parallel")
