"""Privacy budgets, noise mechanisms, accounting, and flavor conversions.

A budget is a tagged privacy-loss quantity: epsilon under pure DP, rho under
zero-concentrated DP (zCDP).  Both compose additively within one flavor;
conversion between flavors is always explicit.

Mechanisms:
  - Laplace(0, sensitivity/epsilon) noise for pure epsilon-DP,
  - Normal(0, sigma^2) with sigma = sensitivity/sqrt(2*rho) for rho-zCDP,
  - the exponential-mechanism epsilon for a zCDP budget is 2*sqrt(2*rho).

rho-zCDP implies (eps, delta)-DP with eps = rho + 2*sqrt(rho*log(1/delta))
for any delta in (0, 1).

Reproducibility contract: every randomized operation consumes from an
explicitly passed ``numpy.random.Generator``.  ``make_rng`` derives
independent streams (PCG64) from a 64-bit seed plus an integer path, so a
run is reproducible given (seed, stream path).  The generator choice is
fixed per release.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument


class Flavor(enum.Enum):
    PURE_DP = "pure_dp"
    ZCDP = "zcdp"


@dataclass(frozen=True)
class PrivacyBudget:
    """A privacy-loss quantity: epsilon if PURE_DP, rho if ZCDP.

    value == 0 means "no information may be released"; mechanisms reject it.
    """

    flavor: Flavor
    value: float

    def __post_init__(self):
        if not isinstance(self.flavor, Flavor):
            raise InvalidArgument(f"flavor must be a Flavor, got {self.flavor!r}")
        v = float(self.value)
        if not math.isfinite(v) or v < 0.0:
            raise InvalidArgument(f"budget value must be finite and >= 0, got {v}")
        object.__setattr__(self, "value", v)

    @staticmethod
    def pure(epsilon: float) -> "PrivacyBudget":
        return PrivacyBudget(Flavor.PURE_DP, epsilon)

    @staticmethod
    def zcdp(rho: float) -> "PrivacyBudget":
        return PrivacyBudget(Flavor.ZCDP, rho)

    def split(self, k: int) -> list["PrivacyBudget"]:
        return split_budget(self, k)


@dataclass(frozen=True)
class GlobalBounds:
    """A-priori bounds on a protected quantity, required for sensitivity."""

    lower: float
    upper: float

    def __post_init__(self):
        lo, hi = float(self.lower), float(self.upper)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise InvalidArgument("bounds must be finite")
        if not lo < hi:
            raise InvalidArgument(f"bounds require lower < upper, got ({lo}, {hi})")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all((x >= self.lower) & (x <= self.upper)))


def split_budget(budget: PrivacyBudget, k: int) -> list[PrivacyBudget]:
    """Divide a budget into k equal parts of the same flavor."""
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise InvalidArgument(f"k must be a positive integer, got {k!r}")
    part = budget.value / k
    return [PrivacyBudget(budget.flavor, part) for _ in range(int(k))]


def compose(budgets) -> PrivacyBudget:
    """Sum budgets of one flavor.  Empty input is an error (flavor unknown)."""
    budgets = list(budgets)
    if not budgets:
        raise InvalidArgument("compose() of an empty budget list: flavor is undetermined")
    flavor = budgets[0].flavor
    if any(b.flavor is not flavor for b in budgets):
        raise InvalidArgument("cannot compose budgets of mixed flavors; convert explicitly")
    # fsum keeps the composed total within 1 ulp of the exact sum.
    return PrivacyBudget(flavor, math.fsum(b.value for b in budgets))


def zcdp_to_approx_dp(rho: float, delta: float) -> float:
    """epsilon such that rho-zCDP implies (epsilon, delta)-DP."""
    rho = float(rho)
    delta = float(delta)
    if rho < 0.0 or not math.isfinite(rho):
        raise InvalidArgument(f"rho must be finite and >= 0, got {rho}")
    if not 0.0 < delta < 1.0:
        raise InvalidArgument(f"delta must lie in (0, 1), got {delta}")
    return rho + 2.0 * math.sqrt(rho * math.log(1.0 / delta))


def exp_mech_epsilon(budget: PrivacyBudget) -> float:
    """The exponential-mechanism epsilon realizing this budget.

    A pure-DP budget is used as-is; a rho-zCDP budget maps to
    epsilon = 2*sqrt(2*rho) (equivalently sqrt(8*rho)).
    """
    if budget.value <= 0.0:
        raise InvalidArgument("a zero budget releases nothing; cannot run a mechanism")
    if budget.flavor is Flavor.PURE_DP:
        return budget.value
    return 2.0 * math.sqrt(2.0 * budget.value)


def laplace_noise(scale: float, rng: np.random.Generator, size=None):
    """Laplace(0, scale) noise via the inverse CDF of a uniform draw.

    Portable and exactly testable: x = -scale * sign(t) * log1p(-2|t|) with
    t = U - 1/2, U ~ Uniform[0, 1).  U is floored away from 0 so the result
    is always finite.
    """
    u = rng.random(size)
    u = np.maximum(u, 2.0 ** -54)
    t = u - 0.5
    out = -scale * np.sign(t) * np.log1p(-2.0 * np.abs(t))
    return float(out) if size is None else out


def laplace_sanitize(x, sensitivity: float, epsilon: float, rng: np.random.Generator):
    """Release x + Laplace(0, sensitivity/epsilon) noise (pure epsilon-DP)."""
    sensitivity = float(sensitivity)
    epsilon = float(epsilon)
    if sensitivity < 0.0 or not math.isfinite(sensitivity):
        raise InvalidArgument(f"sensitivity must be finite and >= 0, got {sensitivity}")
    if epsilon <= 0.0 or not math.isfinite(epsilon):
        raise InvalidArgument(f"epsilon must be finite and > 0, got {epsilon}")
    if sensitivity == 0.0:
        return x
    x = np.asarray(x, dtype=float)
    noise = laplace_noise(sensitivity / epsilon, rng, size=x.shape if x.ndim else None)
    out = x + noise
    return float(out) if out.ndim == 0 else out


def gaussian_sanitize(x, sensitivity: float, rho: float, rng: np.random.Generator):
    """Release x + Normal(0, sigma^2), sigma = sensitivity/sqrt(2*rho) (rho-zCDP)."""
    sensitivity = float(sensitivity)
    rho = float(rho)
    if sensitivity < 0.0 or not math.isfinite(sensitivity):
        raise InvalidArgument(f"sensitivity must be finite and >= 0, got {sensitivity}")
    if rho <= 0.0 or not math.isfinite(rho):
        raise InvalidArgument(f"rho must be finite and > 0, got {rho}")
    if sensitivity == 0.0:
        return x
    sigma = sensitivity / math.sqrt(2.0 * rho)
    x = np.asarray(x, dtype=float)
    noise = sigma * rng.standard_normal(x.shape if x.ndim else None)
    out = x + noise
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class MechanismSpec:
    """Pairs a sensitivity with the budget that will pay for its release.

    The budget flavor selects the mechanism: PURE_DP -> Laplace (L1
    sensitivity), ZCDP -> Gaussian (L2 sensitivity).  The sensitivity must be
    positive whenever the protected statistic actually depends on the data;
    that is the caller's contract and cannot be checked here.
    """

    sensitivity: float
    budget: PrivacyBudget

    def __post_init__(self):
        s = float(self.sensitivity)
        if s < 0.0 or not math.isfinite(s):
            raise InvalidArgument(f"sensitivity must be finite and >= 0, got {s}")
        object.__setattr__(self, "sensitivity", s)

    def sanitize(self, x, rng: np.random.Generator):
        if self.budget.value <= 0.0:
            raise InvalidArgument("a zero budget releases nothing; cannot run a mechanism")
        if self.budget.flavor is Flavor.PURE_DP:
            return laplace_sanitize(x, self.sensitivity, self.budget.value, rng)
        return gaussian_sanitize(x, self.sensitivity, self.budget.value, rng)


def make_rng(seed: int, *path: int) -> np.random.Generator:
    """An independent PCG64 stream keyed by (seed, *path)."""
    entropy = (int(seed) & 0xFFFFFFFFFFFFFFFF,) + tuple(int(p) for p in path)
    return np.random.default_rng(np.random.SeedSequence(entropy))
