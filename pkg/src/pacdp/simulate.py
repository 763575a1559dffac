"""Synthetic data generators and the scenario-grid experiment runner.

A scenario fixes a data model, group size n (per group), partition count,
censoring rates, a set of methods, a set of budgets, and a repeat count.
Every repeat draws fresh groups, runs each (method, budget) cell through m
sanitization passes, pools them, and scores the pooled inference against the
known mean difference.  A noise-free reference cell ("original") is always
included.

Streams are keyed by (seed, repeat, role, method index, budget index) so
adding methods or budgets to a config never perturbs the draws of existing
cells, and parallel execution is bit-identical to serial.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .combine import combine
from .errors import InvalidArgument, PacdpError
from .estimators import (Inference, McmcConfig, Method, MethodSpec,
                         estimate_2s, estimate_pac)
from .partition import partition_and_difference
from .privacy import GlobalBounds, PrivacyBudget, make_rng, split_budget

DEFAULT_BOUNDS = {
    "gaussian": GlobalBounds(-50.0, 50.0),
    "ziln": GlobalBounds(-100.0, 100.0),
    "zinb": GlobalBounds(-100.0, 100.0),
}


def gen_gaussian(n: int, mu: float, sigma: float,
                 rng: np.random.Generator) -> np.ndarray:
    if sigma <= 0.0:
        raise InvalidArgument(f"sigma must be > 0, got {sigma}")
    return mu + sigma * rng.standard_normal(n)


def gen_ziln(n: int, p: float, mu: float, sigma: float,
             rng: np.random.Generator) -> np.ndarray:
    """Bernoulli(p) gate times LogNormal(mu, sigma^2); zeros elsewhere."""
    if not 0.0 <= p <= 1.0:
        raise InvalidArgument(f"p must lie in [0, 1], got {p}")
    if sigma <= 0.0:
        raise InvalidArgument(f"sigma must be > 0, got {sigma}")
    gate = rng.random(n) < p
    out = np.zeros(n)
    k = int(np.count_nonzero(gate))
    if k:
        out[gate] = np.exp(mu + sigma * rng.standard_normal(k))
    return out


def gen_zinb(n: int, p: float, mu: float, tau: float,
             rng: np.random.Generator) -> np.ndarray:
    """Bernoulli(p) gate times a negative binomial with mean mu and variance
    mu + mu^2/tau, drawn as a gamma-Poisson mixture."""
    if not 0.0 <= p <= 1.0:
        raise InvalidArgument(f"p must lie in [0, 1], got {p}")
    if mu <= 0.0 or tau <= 0.0:
        raise InvalidArgument("mu and tau must be > 0")
    gate = rng.random(n) < p
    out = np.zeros(n)
    k = int(np.count_nonzero(gate))
    if k:
        rate = rng.gamma(shape=tau, scale=mu / tau, size=k)
        out[gate] = rng.poisson(rate).astype(float)
    return out


@dataclass(frozen=True)
class GaussianModel:
    mu0: float
    mu1: float
    sigma: float
    kind: str = field(default="gaussian", init=False)

    def theta_true(self) -> float:
        return self.mu1 - self.mu0

    def draw(self, n: int, group: int, rng: np.random.Generator) -> np.ndarray:
        mu = self.mu1 if group == 1 else self.mu0
        return gen_gaussian(n, mu, self.sigma, rng)


@dataclass(frozen=True)
class ZilnModel:
    p0: float
    p1: float
    mu0: float
    mu1: float
    sigma: float
    kind: str = field(default="ziln", init=False)

    def theta_true(self) -> float:
        s2 = 0.5 * self.sigma ** 2
        return self.p1 * math.exp(self.mu1 + s2) - self.p0 * math.exp(self.mu0 + s2)

    def draw(self, n: int, group: int, rng: np.random.Generator) -> np.ndarray:
        p, mu = (self.p1, self.mu1) if group == 1 else (self.p0, self.mu0)
        return gen_ziln(n, p, mu, self.sigma, rng)


@dataclass(frozen=True)
class ZinbModel:
    p0: float
    p1: float
    mu0: float
    mu1: float
    tau0: float
    tau1: float
    kind: str = field(default="zinb", init=False)

    def theta_true(self) -> float:
        return self.p1 * self.mu1 - self.p0 * self.mu0

    def draw(self, n: int, group: int, rng: np.random.Generator) -> np.ndarray:
        p, mu, tau = ((self.p1, self.mu1, self.tau1) if group == 1
                      else (self.p0, self.mu0, self.tau0))
        return gen_zinb(n, p, mu, tau, rng)


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    model: GaussianModel | ZilnModel | ZinbModel
    n: int                      # per group
    n_parts: int
    alpha: float
    beta: float
    methods: tuple              # of (Method, Inference)
    budgets: tuple              # of PrivacyBudget
    m: int = 4
    repeats: int = 200
    seed: int = 0
    gamma: float = 0.95
    bounds: GlobalBounds | None = None
    mcmc: McmcConfig = McmcConfig()
    theta_true: float | None = None

    def __post_init__(self):
        if self.n % self.n_parts:
            raise InvalidArgument(
                f"n={self.n} must be divisible by n_parts={self.n_parts}")
        if self.m < 2:
            raise InvalidArgument("m must be >= 2 for the combination rule")
        if self.repeats < 0:
            raise InvalidArgument("repeats must be >= 0")
        analytic = self.model.theta_true()
        if self.theta_true is not None:
            if abs(self.theta_true - analytic) > 1e-10 * max(1.0, abs(analytic)):
                raise InvalidArgument(
                    f"declared theta_true={self.theta_true} disagrees with the "
                    f"generator's analytic mean difference {analytic}")
        object.__setattr__(self, "theta_true", analytic)
        if self.bounds is None:
            object.__setattr__(self, "bounds", DEFAULT_BOUNDS[self.model.kind])
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "budgets", tuple(self.budgets))


@dataclass(frozen=True)
class MetricsRow:
    scenario: str
    method: str
    inference: str
    flavor: str
    budget: float
    repeats: int
    failures: int
    bias: float
    rmse: float
    coverage: float
    ci_width: float
    reject_rate: float


def _cells(cfg: ScenarioConfig):
    """(method index, budget index, Method, Inference, budget-or-None).

    The noise-free reference occupies method index 0 with a single
    budget slot; configured methods follow in order.
    """
    cells = [(0, 0, Method.ORIGINAL, Inference.MLE, None)]
    for mi, (method, inference) in enumerate(cfg.methods, start=1):
        for bi, budget in enumerate(cfg.budgets):
            cells.append((mi, bi, method, inference, budget))
    return cells


def _run_repeat(cfg: ScenarioConfig, r: int):
    """All cell outcomes for one repeat; keyed records, order-independent."""
    data_rng = make_rng(cfg.seed, r, 0)
    y1 = cfg.model.draw(cfg.n, 1, data_rng)
    y0 = cfg.model.draw(cfg.n, 0, data_rng)
    z = partition_and_difference(y1, y0, cfg.n_parts, make_rng(cfg.seed, r, 1))
    records = []
    for mi, bi, method, inference, budget in _cells(cfg):
        rng = make_rng(cfg.seed, r, 2, mi, bi)
        try:
            if method is Method.ORIGINAL:
                passes = [estimate_2s(z, cfg.bounds, None, None, noiseless=True)
                          for _ in range(cfg.m)]
            elif method is Method.TWO_STAT:
                per_pass = split_budget(budget, cfg.m)
                passes = [estimate_2s(z, cfg.bounds, pb, rng) for pb in per_pass]
            else:
                spec = MethodSpec(method, cfg.alpha, cfg.beta, cfg.bounds,
                                  split_budget(budget, cfg.m)[0],
                                  inference=inference, mcmc=cfg.mcmc)
                passes = [estimate_pac(z, spec, rng) for _ in range(cfg.m)]
            inf = combine(passes, cfg.gamma)
            records.append(((mi, bi), (inf.estimate, inf.ci_lower, inf.ci_upper,
                                       inf.p_value)))
        except PacdpError:
            records.append(((mi, bi), None))
    return records


def _run_chunk(args):
    cfg, r_lo, r_hi = args
    return [(r, _run_repeat(cfg, r)) for r in range(r_lo, r_hi)]


def run_scenario(cfg: ScenarioConfig, max_workers: int | None = None) -> list[MetricsRow]:
    """Score every (method, budget) cell over cfg.repeats repeats.

    ``max_workers`` defaults to the PACDP_THREADS environment variable (1 if
    unset).  Output is identical for any worker count.
    """
    if max_workers is None:
        max_workers = int(os.environ.get("PACDP_THREADS", "1"))
    reps = cfg.repeats
    if max_workers > 1 and reps > 1:
        n_chunks = min(max_workers * 4, reps)
        edges = np.linspace(0, reps, n_chunks + 1).astype(int)
        tasks = [(cfg, int(lo), int(hi)) for lo, hi in zip(edges[:-1], edges[1:])
                 if hi > lo]
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            chunks = list(pool.map(_run_chunk, tasks))
        by_repeat = dict(pair for chunk in chunks for pair in chunk)
    else:
        by_repeat = {r: _run_repeat(cfg, r) for r in range(reps)}

    per_cell: dict = {key: [] for key in [(mi, bi) for mi, bi, *_ in _cells(cfg)]}
    failures: dict = {key: 0 for key in per_cell}
    for r in range(reps):
        for key, outcome in by_repeat[r]:
            if outcome is None:
                failures[key] += 1
            else:
                per_cell[key].append(outcome)

    rows = []
    theta = cfg.theta_true
    for mi, bi, method, inference, budget in _cells(cfg):
        key = (mi, bi)
        got = per_cell[key]
        n_ok = len(got)
        if n_ok:
            est = np.array([g[0] for g in got])
            lo = np.array([g[1] for g in got])
            hi = np.array([g[2] for g in got])
            pv = np.array([g[3] for g in got])
            bias = float(np.mean(est - theta))
            rmse = float(np.sqrt(np.mean((est - theta) ** 2)))
            coverage = float(np.mean((lo <= theta) & (theta <= hi)))
            width = float(np.mean(hi - lo))
            reject = float(np.mean(pv < 1.0 - cfg.gamma))
        else:
            bias = rmse = coverage = width = reject = math.nan
        rows.append(MetricsRow(
            scenario=cfg.name, method=method.value,
            inference=(inference.value if method in
                       (Method.SIX_STAT, Method.SIX_STAT_RECENSORED,
                        Method.FOUR_STAT, Method.FOUR_STAT_RECENSORED) else ""),
            flavor=(budget.flavor.value if budget is not None else "none"),
            budget=(budget.value if budget is not None else 0.0),
            repeats=n_ok, failures=failures[key], bias=bias, rmse=rmse,
            coverage=coverage, ci_width=width, reject_rate=reject))
    return rows
