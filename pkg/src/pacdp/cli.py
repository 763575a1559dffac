"""Command-line interface, configuration parsing, CSV ingestion, and reports.

Subcommands:
  pacdp simulate --config FILE [--out DIR]   scenario grid -> metrics CSV
  pacdp analyze  --config FILE [--out FILE]  one dataset -> JSON report
  pacdp quantile --input CSV --q P (--epsilon V | --rho V)
                 --lower L --upper U --seed S [--column NAME]

Exit codes: 0 success, 2 configuration error, 3 runtime error.
Environment: PACDP_THREADS caps simulate parallelism (default 1);
PACDP_SEED supplies a default seed when a config omits one.

The JSON report schema is documented in docs/report-schema.md and is
versioned via the "schema_version" field.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .combine import CombinedInference, combine
from .errors import ConfigError, InvalidArgument, PacdpError
from .estimators import (PAC_METHODS, Inference, McmcConfig, Method,
                         MethodSpec, estimate_2s, estimate_pac)
from .partition import (partition_and_difference, trim_to_divisible,
                        validate_censoring_rates)
from .privacy import Flavor, GlobalBounds, PrivacyBudget, make_rng, split_budget
from .quantile import QuantileRequest, private_quantile
from .simulate import (GaussianModel, MetricsRow, ScenarioConfig, ZilnModel,
                       ZinbModel, run_scenario)

SCHEMA_VERSION = 1

METRICS_COLUMNS = ("scenario", "method", "inference", "flavor", "budget",
                   "repeats", "failures", "bias", "rmse", "coverage",
                   "ci_width", "reject_rate")


# ---------------------------------------------------------------------------
# ingestion

def ingest_group_by_count(path, key_column: str, value_column: str) -> np.ndarray:
    """Per-key sums of a numeric column, one entry per distinct key, in
    first-appearance order."""
    sums: dict = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return np.empty(0)
        try:
            ki = header.index(key_column)
            vi = header.index(value_column)
        except ValueError:
            raise ConfigError(
                f"columns ({key_column!r}, {value_column!r}) not found in "
                f"header {header!r} of {path}") from None
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                value = float(row[vi])
            except (ValueError, IndexError):
                raise InvalidArgument(
                    f"{path}:{lineno}: cannot parse {value_column!r} "
                    f"from row {row!r}") from None
            key = row[ki]
            sums[key] = sums.get(key, 0.0) + value
    return np.array(list(sums.values()), dtype=float)


def read_numeric_column(path, column: str | None = None) -> np.ndarray:
    """One numeric CSV column; empty cells are skipped, anything else that
    fails to parse is a row-level error."""
    values = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return np.empty(0)
        if column is None:
            ci = 0
        else:
            try:
                ci = header.index(column)
            except ValueError:
                raise ConfigError(
                    f"column {column!r} not found in header {header!r} of {path}") from None
        for lineno, row in enumerate(reader, start=2):
            if not row or ci >= len(row) or row[ci] == "":
                continue
            try:
                values.append(float(row[ci]))
            except ValueError:
                raise InvalidArgument(
                    f"{path}:{lineno}: cannot parse numeric value from "
                    f"{row[ci]!r}") from None
    return np.array(values, dtype=float)


def random_halves(y: np.ndarray, seed: int):
    """Seeded uniform split into two halves (odd length: extra element to the
    first half)."""
    y = np.asarray(y, dtype=float)
    if y.size < 2:
        raise InvalidArgument("need at least 2 values to split in half")
    perm = make_rng(seed).permutation(y.size)
    cut = (y.size + 1) // 2
    return y[perm[:cut]], y[perm[cut:]]


# ---------------------------------------------------------------------------
# analyze

@dataclass(frozen=True)
class AnalyzeRequest:
    input: str
    mode: str                      # "two_column" | "group_by_count"
    method: Method
    n_parts: int
    alpha: float
    beta: float
    budget: PrivacyBudget | None
    m: int
    gamma: float
    bounds: GlobalBounds
    seed: int
    inference: Inference = Inference.MLE
    mcmc: McmcConfig = McmcConfig()
    y1_column: str | None = None
    y0_column: str | None = None
    key_column: str | None = None
    value_column: str | None = None
    split_seed: int = 0

    def __post_init__(self):
        if self.mode not in ("two_column", "group_by_count"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.mode == "two_column" and (self.y1_column is None or
                                          self.y0_column is None):
            raise ConfigError("two_column mode requires y1_column and y0_column")
        if self.mode == "group_by_count" and (self.key_column is None or
                                              self.value_column is None):
            raise ConfigError("group_by_count mode requires key_column and value_column")
        if self.n_parts < 2:
            raise ConfigError("n_parts must be >= 2")
        if self.m < 2:
            raise ConfigError("m must be >= 2")
        if self.method not in (Method.ORIGINAL,) and self.budget is None:
            raise ConfigError("a budget is required for private methods")
        if self.method in PAC_METHODS:
            validate_censoring_rates(self.alpha, self.beta)


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ConfigError as exc:
        raise ConfigError(f"stage '{name}': {exc}") from exc
    except PacdpError as exc:
        raise PacdpError(f"stage '{name}': {exc}") from exc


def analyze(req: AnalyzeRequest):
    """Run one dataset end to end; returns (CombinedInference, report dict)."""
    if req.mode == "group_by_count":
        y = _stage("ingest", ingest_group_by_count, req.input,
                   req.key_column, req.value_column)
        y1, y0 = _stage("split", random_halves, y, req.split_seed)
    else:
        y1 = _stage("ingest", read_numeric_column, req.input, req.y1_column)
        y0 = _stage("ingest", read_numeric_column, req.input, req.y0_column)
    raw_sizes = (int(y1.size), int(y0.size))
    y1 = _stage("trim", trim_to_divisible, y1, req.n_parts, make_rng(req.seed, 1))
    y0 = _stage("trim", trim_to_divisible, y0, req.n_parts, make_rng(req.seed, 2))
    z = _stage("partition", partition_and_difference, y1, y0, req.n_parts,
               make_rng(req.seed, 3))

    rng = make_rng(req.seed, 4)

    def run_passes():
        if req.method is Method.ORIGINAL:
            return [estimate_2s(z, req.bounds, None, None, noiseless=True)
                    for _ in range(req.m)]
        per_pass = split_budget(req.budget, req.m)
        if req.method is Method.TWO_STAT:
            return [estimate_2s(z, req.bounds, pb, rng) for pb in per_pass]
        spec = MethodSpec(req.method, req.alpha, req.beta, req.bounds,
                          per_pass[0], inference=req.inference, mcmc=req.mcmc)
        return [estimate_pac(z, spec, rng) for _ in range(req.m)]

    passes = _stage("estimate", run_passes)
    inference = _stage("combine", combine, passes, req.gamma)
    report = _build_report(req, raw_sizes, (y1.size, y0.size), passes, inference)
    return inference, report


def _ledger_from_passes(req: AnalyzeRequest, passes) -> list:
    ledger = []
    for h, p in enumerate(passes, start=1):
        for spend in p.diagnostics.get("spends", []):
            share = Fraction(spend["share"]) / req.m
            ledger.append({"pass": h, "stat": spend["stat"],
                           "share": f"{share.numerator}/{share.denominator}",
                           "value": spend["value"]})
    return ledger


def _build_report(req: AnalyzeRequest, raw_sizes, used_sizes, passes,
                  inf: CombinedInference) -> dict:
    if req.method is Method.ORIGINAL:
        budget = {"flavor": "none", "total": 0.0, "ledger": []}
    else:
        budget = {"flavor": req.budget.flavor.value, "total": req.budget.value,
                  "ledger": _ledger_from_passes(req, passes)}
    return {
        "schema_version": SCHEMA_VERSION,
        "method": req.method.value,
        "inference": (req.inference.value if req.method not in
                      (Method.ORIGINAL, Method.TWO_STAT, Method.WINSORIZED,
                       Method.TRIMMED, Method.NAIVE) else ""),
        "estimate": inf.estimate,
        "total_variance": inf.total_var,
        "df": (None if math.isinf(inf.df) else inf.df),
        "m": inf.m,
        "within_variance": inf.w,
        "between_variance": inf.b,
        "gamma": inf.gamma,
        "ci": {"lower": inf.ci_lower, "upper": inf.ci_upper},
        "p_value": inf.p_value,
        "passes": [{"theta": p.theta, "w": p.w, "diagnostics": p.diagnostics}
                   for p in passes],
        "budget": budget,
        "data": {
            "path": str(req.input), "mode": req.mode,
            "rows_ingested": list(raw_sizes),
            "rows_used": [int(u) for u in used_sizes],
            "n_parts": req.n_parts, "alpha": req.alpha, "beta": req.beta,
            "bounds": {"lower": req.bounds.lower, "upper": req.bounds.upper},
        },
        "seed": req.seed,
    }


def report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# config parsing

def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise ConfigError(f"missing {key!r} in {where}")
    return obj[key]


def _parse_budget(obj) -> PrivacyBudget:
    try:
        flavor = Flavor(_require(obj, "flavor", "budget"))
    except ValueError:
        raise ConfigError(f"unknown budget flavor {obj.get('flavor')!r}") from None
    return PrivacyBudget(flavor, float(_require(obj, "value", "budget")))


def _parse_bounds(obj) -> GlobalBounds:
    return GlobalBounds(float(_require(obj, "lower", "bounds")),
                        float(_require(obj, "upper", "bounds")))


def _parse_method(obj):
    if isinstance(obj, str):
        obj = {"method": obj}
    try:
        method = Method(_require(obj, "method", "methods[]"))
    except ValueError:
        raise ConfigError(f"unknown method {obj.get('method')!r}") from None
    try:
        inference = Inference(obj.get("inference", "mle"))
    except ValueError:
        raise ConfigError(f"unknown inference {obj.get('inference')!r}") from None
    return method, inference


def _parse_mcmc(obj) -> McmcConfig:
    if obj is None:
        return McmcConfig()
    allowed = {"iterations", "burn_in", "scale_theta", "scale_logvar",
               "adapt_every", "target_accept", "seed"}
    bad = set(obj) - allowed
    if bad:
        raise ConfigError(f"unknown mcmc options {sorted(bad)}")
    return McmcConfig(**obj)


def _parse_model(obj):
    kind = _require(obj, "kind", "data")
    params = {k: v for k, v in obj.items() if k != "kind"}
    try:
        if kind == "gaussian":
            return GaussianModel(**params)
        if kind == "ziln":
            return ZilnModel(**params)
        if kind == "zinb":
            return ZinbModel(**params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for {kind!r} data: {exc}") from None
    raise ConfigError(f"unknown data kind {kind!r}")


def _default_seed(obj: dict) -> int:
    if "seed" in obj:
        return int(obj["seed"])
    env = os.environ.get("PACDP_SEED")
    return int(env) if env else 0


def scenario_from_config(obj: dict, index: int) -> ScenarioConfig:
    where = f"scenarios[{index}]"
    methods = tuple(_parse_method(mo) for mo in _require(obj, "methods", where))
    budgets = tuple(_parse_budget(bo) for bo in _require(obj, "budgets", where))
    bounds = _parse_bounds(obj["bounds"]) if "bounds" in obj else None
    try:
        return ScenarioConfig(
            name=obj.get("name", f"scenario{index}"),
            model=_parse_model(_require(obj, "data", where)),
            n=int(_require(obj, "n", where)),
            n_parts=int(_require(obj, "P", where)),
            alpha=float(_require(obj, "alpha", where)),
            beta=float(_require(obj, "beta", where)),
            methods=methods, budgets=budgets,
            m=int(obj.get("m", 4)),
            repeats=int(obj.get("repeats", 200)),
            seed=_default_seed(obj),
            gamma=float(obj.get("gamma", 0.95)),
            bounds=bounds,
            mcmc=_parse_mcmc(obj.get("mcmc")),
            theta_true=obj.get("theta_true"),
        )
    except InvalidArgument as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def analyze_request_from_config(obj: dict) -> AnalyzeRequest:
    method, inference = _parse_method(
        {"method": _require(obj, "method", "analyze config"),
         "inference": obj.get("inference", "mle")})
    budget = _parse_budget(obj["budget"]) if "budget" in obj else None
    try:
        return AnalyzeRequest(
            input=str(_require(obj, "input", "analyze config")),
            mode=str(_require(obj, "mode", "analyze config")),
            method=method, inference=inference,
            n_parts=int(_require(obj, "P", "analyze config")),
            alpha=float(obj.get("alpha", 0.1)),
            beta=float(obj.get("beta", 0.1)),
            budget=budget,
            m=int(obj.get("m", 4)),
            gamma=float(obj.get("gamma", 0.95)),
            bounds=_parse_bounds(_require(obj, "bounds", "analyze config")),
            seed=_default_seed(obj),
            mcmc=_parse_mcmc(obj.get("mcmc")),
            y1_column=obj.get("y1_column"),
            y0_column=obj.get("y0_column"),
            key_column=obj.get("key_column"),
            value_column=obj.get("value_column"),
            split_seed=int(obj.get("split_seed", 0)),
        )
    except InvalidArgument as exc:
        raise ConfigError(str(exc)) from exc


# ---------------------------------------------------------------------------
# output

def metrics_csv(rows: list[MetricsRow]) -> str:
    out = [",".join(METRICS_COLUMNS)]
    for r in rows:
        out.append(",".join([
            r.scenario, r.method, r.inference, r.flavor, repr(r.budget),
            str(r.repeats), str(r.failures), repr(r.bias), repr(r.rmse),
            repr(r.coverage), repr(r.ci_width), repr(r.reject_rate)]))
    return "\n".join(out) + "\n"


def _load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None


# ---------------------------------------------------------------------------
# entry points

def _cmd_simulate(args) -> int:
    cfg = _load_json(args.config)
    scenarios = cfg.get("scenarios")
    if not isinstance(scenarios, list) or not scenarios:
        raise ConfigError("config must contain a non-empty 'scenarios' list")
    rows = []
    for i, obj in enumerate(scenarios):
        rows.extend(run_scenario(scenario_from_config(obj, i)))
    text = metrics_csv(rows)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "metrics.csv")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        print(path)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_analyze(args) -> int:
    req = analyze_request_from_config(_load_json(args.config))
    _, report = analyze(req)
    text = report_json(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        print(args.out)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_quantile(args) -> int:
    if (args.epsilon is None) == (args.rho is None):
        raise ConfigError("specify exactly one of --epsilon or --rho")
    if args.epsilon is not None:
        budget = PrivacyBudget(Flavor.PURE_DP, args.epsilon)
    else:
        budget = PrivacyBudget(Flavor.ZCDP, args.rho)
    z = read_numeric_column(args.input, args.column)
    req = QuantileRequest(args.q, GlobalBounds(args.lower, args.upper), budget)
    value = private_quantile(z, req, make_rng(args.seed))
    print(repr(value))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pacdp",
        description="Differentially private two-group mean-difference "
                    "inference via partitioning and censoring.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a scenario grid to a metrics CSV")
    p_sim.add_argument("--config", required=True, help="JSON scenario config")
    p_sim.add_argument("--out", help="output directory (default: stdout)")
    p_sim.set_defaults(fn=_cmd_simulate)

    p_an = sub.add_parser("analyze", help="analyze one CSV dataset to a JSON report")
    p_an.add_argument("--config", required=True, help="JSON analyze config")
    p_an.add_argument("--out", help="output file (default: stdout)")
    p_an.set_defaults(fn=_cmd_analyze)

    p_q = sub.add_parser("quantile", help="one differentially private quantile")
    p_q.add_argument("--input", required=True, help="CSV with a numeric column")
    p_q.add_argument("--column", help="column name (default: first column)")
    p_q.add_argument("--q", type=float, required=True, help="target proportion in (0,1)")
    p_q.add_argument("--epsilon", type=float, help="pure-DP budget")
    p_q.add_argument("--rho", type=float, help="zCDP budget")
    p_q.add_argument("--lower", type=float, required=True, help="global lower bound")
    p_q.add_argument("--upper", type=float, required=True, help="global upper bound")
    p_q.add_argument("--seed", type=int, default=0)
    p_q.set_defaults(fn=_cmd_quantile)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"pacdp: config error: {exc}", file=sys.stderr)
        return 2
    except PacdpError as exc:
        print(f"pacdp: error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"pacdp: error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
