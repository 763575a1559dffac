"""Estimation methods producing per-release (theta, variance) pairs.

Methods are named by what they release:

  - ``2s``: sums of the raw partition differences, no censoring (baseline).
  - ``6s``: both censoring thresholds, both tail counts, and the interior
    sum / sum of squares of the censored data.
  - ``4s``: thresholds plus interior sums, with tail counts replaced by the
    public targets ceil(P*alpha), ceil(P*beta).
  - ``6s-recensored`` / ``4s-recensored``: the statistics are recomputed
    against the sanitized thresholds before being sanitized themselves.
  - ``winsorized`` / ``trimmed``: model-free plug-in means (symmetric
    censoring only).
  - ``naive``: treats the interior values as a complete Gaussian sample; an
    intentionally invalid negative control.
  - ``original``: the noise-free baseline, for reference runs.

Likelihood methods support two inference modes: ``mle`` maximizes the
censored likelihood (variance from observed information in theta), and
``bayes`` samples the posterior under the scale-invariant prior 1/sigma2 by
random-walk Metropolis (posterior mean and variance of theta).

Each released estimate carries a diagnostics dict including the exact budget
shares spent, which sum to 1 as rationals.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import optimize

from . import _kernels
from .errors import DegenerateDataError, EstimationError, InvalidArgument
from .likelihood import (CensoredStats, censored_loglik_d2theta,
                         moment_init, repair_bounds, repair_counts,
                         repair_sums)
from .partition import (CensoredData, censored_summaries,
                        censor_at_sample_quantiles,
                        recompute_with_sanitized_bounds,
                        validate_censoring_rates)
from .privacy import (GlobalBounds, MechanismSpec, PrivacyBudget, make_rng,
                      split_budget)
from .quantile import QuantileRequest, private_quantile


class Method(enum.Enum):
    TWO_STAT = "2s"
    SIX_STAT = "6s"
    SIX_STAT_RECENSORED = "6s-recensored"
    FOUR_STAT = "4s"
    FOUR_STAT_RECENSORED = "4s-recensored"
    WINSORIZED = "winsorized"
    TRIMMED = "trimmed"
    NAIVE = "naive"
    ORIGINAL = "original"


class Inference(enum.Enum):
    MLE = "mle"
    BAYES = "bayes"


LIKELIHOOD_METHODS = frozenset({Method.SIX_STAT, Method.SIX_STAT_RECENSORED,
                                Method.FOUR_STAT, Method.FOUR_STAT_RECENSORED})
RECENSORED_METHODS = frozenset({Method.SIX_STAT_RECENSORED,
                                Method.FOUR_STAT_RECENSORED})
PAC_METHODS = LIKELIHOOD_METHODS | {Method.WINSORIZED, Method.TRIMMED,
                                    Method.NAIVE}
SYMMETRIC_ONLY = frozenset({Method.WINSORIZED, Method.TRIMMED})


def ceil_count(x: float) -> int:
    """ceil(x) with a relative backoff so products like 0.1*100 do not land
    an ulp above the intended integer."""
    return int(math.ceil(x - 1e-9 * max(1.0, abs(x))))


@dataclass(frozen=True)
class McmcConfig:
    iterations: int = 10_000
    burn_in: int = 2_000
    scale_theta: float | None = None
    scale_logvar: float | None = None
    adapt_every: int = 100
    target_accept: float = 0.3
    seed: int | None = None

    def __post_init__(self):
        if self.burn_in < 0 or self.iterations <= self.burn_in:
            raise InvalidArgument("iterations must exceed burn_in >= 0")
        if self.adapt_every < 1:
            raise InvalidArgument("adapt_every must be >= 1")
        if not 0.0 < self.target_accept < 1.0:
            raise InvalidArgument("target_accept must lie in (0, 1)")
        for s in (self.scale_theta, self.scale_logvar):
            if s is not None and not s > 0.0:
                raise InvalidArgument("proposal scales must be > 0")


@dataclass(frozen=True)
class MethodSpec:
    method: Method
    alpha: float
    beta: float
    bounds: GlobalBounds
    budget_per_pass: PrivacyBudget
    inference: Inference = Inference.MLE
    mcmc: McmcConfig = McmcConfig()

    def __post_init__(self):
        if self.method in PAC_METHODS:
            validate_censoring_rates(self.alpha, self.beta)
        if self.method in SYMMETRIC_ONLY and self.alpha != self.beta:
            raise InvalidArgument(
                f"{self.method.value} requires symmetric censoring (alpha == beta)")


@dataclass(frozen=True)
class PointEstimate:
    """One released (estimate, within-variance) pair plus diagnostics."""

    theta: float
    w: float
    diagnostics: dict = field(default_factory=dict, compare=False)


def variance_floor(theta: float) -> float:
    return 1e-12 * max(1.0, theta * theta)


def _finish(theta: float, w: float, diagnostics: dict) -> PointEstimate:
    floor = variance_floor(theta)
    if not (w > floor):
        w = floor
        diagnostics["variance_floored"] = True
    return PointEstimate(float(theta), float(w), diagnostics)


# ---------------------------------------------------------------------------
# likelihood inference

def mle_censored(stats: CensoredStats, *, max_iter: int = 500,
                 grad_tol: float = 1e-8) -> PointEstimate:
    """Maximize the censored likelihood over (theta, log sigma2).

    Quasi-Newton ascent with analytic theta-derivatives and central-difference
    log-variance derivatives; the variance estimate is the inverse observed
    information in theta at the optimum.
    """
    theta0, sigma20 = moment_init(stats)
    width = stats.upper - stats.lower
    v0 = math.log(sigma20)
    box = [(stats.lower - width, stats.upper + width), (v0 - 40.0, v0 + 40.0)]
    args = (stats.lower, stats.upper, stats.s1, stats.s2,
            stats.n_lower, stats.n_upper, float(stats.n_parts))

    def negll(x):
        return -_kernels.censored_loglik(x[0], math.exp(x[1]), *args)

    def grad(x):
        s2v = math.exp(x[1])
        gt = _kernels.censored_dll_dtheta(x[0], s2v, *args)
        h = 1e-6 * (1.0 + abs(x[1]))
        gv = (_kernels.censored_loglik(x[0], math.exp(x[1] + h), *args)
              - _kernels.censored_loglik(x[0], math.exp(x[1] - h), *args)) / (2.0 * h)
        return np.array([-gt, -gv])

    starts = [np.array([theta0, v0]),
              np.array([0.5 * (stats.lower + stats.upper),
                        2.0 * math.log(0.5 * width)])]
    res = None
    for x0 in starts:
        res = optimize.minimize(negll, x0, jac=grad, method="L-BFGS-B",
                                bounds=box,
                                options={"maxiter": max_iter, "ftol": 1e-13,
                                         "gtol": grad_tol})
        if res.success or np.max(np.abs(grad(res.x))) <= grad_tol * (1.0 + abs(res.fun)):
            break
    else:
        raise EstimationError(
            f"censored-likelihood optimizer did not converge: {res.message}",
            last_iterate=(float(res.x[0]), math.exp(float(res.x[1]))))
    theta_hat, v_hat = float(res.x[0]), float(res.x[1])
    sigma2_hat = math.exp(v_hat)
    curv = censored_loglik_d2theta(theta_hat, sigma2_hat, stats)
    diagnostics = {"sigma2": sigma2_hat, "iterations": int(res.nit),
                   "optimizer_message": str(res.message)}
    w = -1.0 / curv if curv < 0.0 else -1.0
    return _finish(theta_hat, w, diagnostics)


def posterior_mh(stats: CensoredStats, cfg: McmcConfig,
                 rng: np.random.Generator) -> PointEstimate:
    """Posterior mean and variance of theta under the 1/sigma2 prior,
    sampled by component-wise random-walk Metropolis on (theta, log sigma2).
    Proposal scales adapt during burn-in toward the target acceptance rate.
    """
    theta0, sigma20 = moment_init(stats)
    n_in = stats.n_inner
    st0 = cfg.scale_theta if cfg.scale_theta is not None else \
        2.4 * math.sqrt(sigma20 / n_in)
    sv0 = cfg.scale_logvar if cfg.scale_logvar is not None else \
        2.4 * math.sqrt(2.0 / n_in)
    r = rng if cfg.seed is None else make_rng(cfg.seed)
    norm_t = r.standard_normal(cfg.iterations)
    norm_v = r.standard_normal(cfg.iterations)
    unif_t = r.random(cfg.iterations)
    unif_v = r.random(cfg.iterations)
    out = np.empty(cfg.iterations - cfg.burn_in)
    acc_t, acc_v, st, sv = _kernels.mh_chain(
        stats.lower, stats.upper, stats.s1, stats.s2,
        stats.n_lower, stats.n_upper, float(stats.n_parts),
        theta0, math.log(sigma20), st0, sv0,
        cfg.burn_in, cfg.adapt_every, cfg.target_accept,
        norm_t, norm_v, unif_t, unif_v, out)
    diagnostics = {"accept_theta": acc_t, "accept_logvar": acc_v,
                   "scale_theta": st, "scale_logvar": sv,
                   "draws": int(out.size)}
    return _finish(float(out.mean()), float(out.var(ddof=1)), diagnostics)


# ---------------------------------------------------------------------------
# closed-form plug-ins

def two_stat_plugin(s1: float, s2: float, n_parts: int):
    """Gaussian-likelihood estimate from (sum, sum of squares)."""
    if n_parts < 2:
        raise InvalidArgument("at least 2 partitions required (variance undefined)")
    theta = s1 / n_parts
    w = (s2 - s1 * s1 / n_parts) / (n_parts * (n_parts - 1))
    return theta, w


def winsorized_plugin(lower: float, upper: float, s1: float, s2: float,
                      n_parts: int, alpha: float, beta: float):
    """Winsorized mean / variance with sanitized inputs and public rates."""
    pa = n_parts * alpha
    pb = n_parts * beta
    denom = n_parts - pa - pb - 1.0
    if denom <= 0.0:
        raise DegenerateDataError("too few interior partitions for the winsorized variance")
    theta = alpha * lower + beta * upper + s1 / n_parts
    core = (alpha * (lower - theta) ** 2 + beta * (upper - theta) ** 2
            + s2 / n_parts - (1.0 - alpha - beta) * theta * theta)
    var = (n_parts - 1.0) / (denom * denom) * core
    return theta, var


def trimmed_plugin(lower: float, upper: float, s1: float, s2: float,
                   n_parts: int, alpha: float, beta: float):
    """Trimmed mean / variance with sanitized inputs and public rates."""
    pa = n_parts * alpha
    pb = n_parts * beta
    n_in = n_parts - pa - pb
    if n_in - 1.0 <= 0.0:
        raise DegenerateDataError("too few interior partitions for the trimmed variance")
    theta = s1 / n_in
    core = (alpha * (lower - theta) ** 2 + beta * (upper - theta) ** 2
            + s2 / n_parts - (1.0 - alpha - beta) * theta * theta)
    var = core / ((1.0 - alpha - beta) * (n_in - 1.0))
    return theta, var


def naive_plugin(s1: float, s2: float, n_parts: int, alpha: float, beta: float):
    """Negative control: treats interior values as a complete Gaussian sample
    of size ceil(P*(1-alpha-beta)); ignores the censoring entirely."""
    n_c = ceil_count(n_parts * (1.0 - alpha - beta))
    if n_c < 2:
        raise DegenerateDataError("naive plug-in needs at least 2 interior partitions")
    theta = s1 / n_c
    w = (s2 - s1 * s1 / n_c) / ((n_c - 1) * n_c)
    return theta, w


# ---------------------------------------------------------------------------
# non-private winsorized / trimmed estimates from censored data

def winsorized_stats(d: CensoredData):
    """Non-private winsorized mean and variance (empirical tail proportions)."""
    if d.alpha != d.beta:
        raise InvalidArgument("winsorized estimates require alpha == beta")
    if d.n_inner < 2:
        raise DegenerateDataError("need at least 2 uncensored partitions")
    s = censored_summaries(d)
    n = d.n_parts
    a = d.n_lower / n
    b = d.n_upper / n
    theta = (d.n_lower * d.lower + d.n_upper * d.upper + s.s1) / n
    denom = n - d.n_lower - d.n_upper - 1.0
    core = (a * (d.lower - theta) ** 2 + b * (d.upper - theta) ** 2
            + s.s2 / n - (1.0 - a - b) * theta * theta)
    var = (n - 1.0) / (denom * denom) * core
    return theta, var


def trimmed_stats(d: CensoredData):
    """Non-private trimmed mean and variance (empirical tail proportions)."""
    if d.alpha != d.beta:
        raise InvalidArgument("trimmed estimates require alpha == beta")
    if d.n_inner < 2:
        raise DegenerateDataError("need at least 2 uncensored partitions")
    s = censored_summaries(d)
    n = d.n_parts
    n_in = d.n_inner
    theta = s.s1 / n_in
    _, var_w = winsorized_stats(d)
    var = n * (n_in - 1.0) / (n_in * (n - 1.0)) * var_w
    return theta, var


# ---------------------------------------------------------------------------
# release pipelines

def _validate_z(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if z.ndim != 1 or z.size < 2:
        raise InvalidArgument("z must be a 1-d vector with at least 2 entries")
    if not np.all(np.isfinite(z)):
        raise InvalidArgument("z must be finite")
    return z


def estimate_2s(z: np.ndarray, bounds: GlobalBounds, budget: PrivacyBudget | None,
                rng: np.random.Generator | None, *,
                noiseless: bool = False) -> PointEstimate:
    """Baseline estimate from sanitized (sum, sum of squares) of raw
    differences; sensitivities come from the global bounds.  With
    ``noiseless=True`` the statistics are released as-is (reference runs)."""
    z = _validate_z(z)
    if not bounds.contains(z):
        raise InvalidArgument("z exceeds the declared global bounds")
    n = z.size
    s1 = math.fsum(z.tolist())
    s2 = math.fsum((z * z).tolist())
    diagnostics: dict = {"spends": []}
    if noiseless:
        s1_star, s2_star = s1, s2
    else:
        if budget is None or rng is None:
            raise InvalidArgument("a budget and rng are required unless noiseless")
        parts = split_budget(budget, 2)
        s1_star = MechanismSpec(bounds.width, parts[0]).sanitize(s1, rng)
        d2 = max(bounds.lower ** 2, bounds.upper ** 2)
        s2_star = MechanismSpec(d2, parts[1]).sanitize(s2, rng)
        diagnostics["spends"] = [_spend("s1", Fraction(1, 2), parts[0]),
                                 _spend("s2", Fraction(1, 2), parts[1])]
    theta, w = two_stat_plugin(s1_star, s2_star, n)
    return _finish(theta, w, diagnostics)


def _spend(stat: str, share: Fraction, budget: PrivacyBudget) -> dict:
    return {"stat": stat, "share": f"{share.numerator}/{share.denominator}",
            "value": budget.value}


def estimate_pac(z: np.ndarray, spec: MethodSpec, rng: np.random.Generator, *,
                 sanitized_bounds: tuple[float, float] | None = None) -> PointEstimate:
    """One full sanitization pass of a censoring-based method.

    Steps: sanitize the two censoring thresholds with the private-quantile
    mechanism, censor (recensored variants use the sanitized thresholds, the
    others the in-sample quantiles), sanitize the remaining statistics with
    threshold-derived sensitivities, repair, and dispatch to the method's
    estimator.  ``sanitized_bounds`` bypasses the quantile mechanism and is a
    diagnostics/testing hook only.
    """
    if spec.method not in PAC_METHODS:
        raise InvalidArgument(f"estimate_pac does not handle {spec.method.value}")
    z = _validate_z(z)
    n = z.size
    alpha, beta = spec.alpha, spec.beta
    k = 6 if spec.method in (Method.SIX_STAT, Method.SIX_STAT_RECENSORED) else 4
    parts = split_budget(spec.budget_per_pass, k)
    share = Fraction(1, k)
    spends = []
    diagnostics: dict = {}

    if sanitized_bounds is None:
        lo_star = private_quantile(z, QuantileRequest(alpha, spec.bounds, parts[0]), rng)
        hi_star = private_quantile(z, QuantileRequest(1.0 - beta, spec.bounds, parts[1]), rng)
        spends += [_spend("lower_threshold", share, parts[0]),
                   _spend("upper_threshold", share, parts[1])]
    else:
        lo_star, hi_star = sanitized_bounds
        diagnostics["bounds_injected"] = True
    lo_star, hi_star, bounds_repaired = repair_bounds(lo_star, hi_star, spec.bounds)
    if bounds_repaired:
        diagnostics["bounds_repaired"] = True

    if spec.method in RECENSORED_METHODS:
        cd = recompute_with_sanitized_bounds(z, lo_star, hi_star, alpha, beta)
    else:
        cd = censor_at_sample_quantiles(z, alpha, beta)
    s = censored_summaries(cd)

    d1 = hi_star - lo_star
    d2 = max(hi_star * hi_star, lo_star * lo_star)
    if spec.method in (Method.SIX_STAT, Method.SIX_STAT_RECENSORED):
        nl_star = MechanismSpec(1.0, parts[2]).sanitize(float(s.n_lower), rng)
        nu_star = MechanismSpec(1.0, parts[3]).sanitize(float(s.n_upper), rng)
        s1_star = MechanismSpec(d1, parts[4]).sanitize(s.s1, rng)
        s2_star = MechanismSpec(d2, parts[5]).sanitize(s.s2, rng)
        spends += [_spend("n_lower", share, parts[2]),
                   _spend("n_upper", share, parts[3]),
                   _spend("s1", share, parts[4]),
                   _spend("s2", share, parts[5])]
        nl_star, nu_star, counts_repaired = repair_counts(nl_star, nu_star, n)
        if counts_repaired:
            diagnostics["counts_repaired"] = True
    else:
        s1_star = MechanismSpec(d1, parts[2]).sanitize(s.s1, rng)
        s2_star = MechanismSpec(d2, parts[3]).sanitize(s.s2, rng)
        spends += [_spend("s1", share, parts[2]),
                   _spend("s2", share, parts[3])]
        nl_star = float(ceil_count(n * alpha))
        nu_star = float(ceil_count(n * beta))
    diagnostics["spends"] = spends

    if spec.method in LIKELIHOOD_METHODS:
        s2_star, sums_repaired = repair_sums(s1_star, s2_star,
                                             n - nl_star - nu_star,
                                             hi_star - lo_star)
        if sums_repaired:
            diagnostics["sums_repaired"] = True
        stats = CensoredStats(lo_star, hi_star, s1_star, s2_star,
                              nl_star, nu_star, n)
        if spec.inference is Inference.BAYES:
            est = posterior_mh(stats, spec.mcmc, rng)
        else:
            est = mle_censored(stats)
        est.diagnostics.update(diagnostics)
        return est
    if spec.method is Method.WINSORIZED:
        theta, w = winsorized_plugin(lo_star, hi_star, s1_star, s2_star, n, alpha, beta)
    elif spec.method is Method.TRIMMED:
        theta, w = trimmed_plugin(lo_star, hi_star, s1_star, s2_star, n, alpha, beta)
    else:
        theta, w = naive_plugin(s1_star, s2_star, n, alpha, beta)
    return _finish(theta, w, diagnostics)


def nonprivate_censored_mle(z: np.ndarray, alpha: float, beta: float, *,
                            four_stat_counts: bool = True) -> PointEstimate:
    """Noise-free reference: censor at the in-sample quantiles and maximize
    the censored likelihood.  With ``four_stat_counts`` the tail counts are
    the public targets (as the 4-statistic release uses); otherwise the
    observed counts."""
    z = _validate_z(z)
    cd = censor_at_sample_quantiles(z, alpha, beta)
    s = censored_summaries(cd)
    if four_stat_counts:
        nl = float(ceil_count(z.size * alpha))
        nu = float(ceil_count(z.size * beta))
    else:
        nl, nu = float(s.n_lower), float(s.n_upper)
    stats = CensoredStats(s.lower, s.upper, s.s1, s.s2, nl, nu, z.size)
    return mle_censored(stats)
