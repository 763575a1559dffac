"""Censored-Gaussian likelihood surface over sanitized statistics.

The log-likelihood of (theta, sigma2) given tail counts (n_lo, n_hi) at
thresholds (lower, upper) and interior sums (s1, s2):

    n_lo * log Phi((lower-theta)/sigma)
  + n_hi * log(1 - Phi((upper-theta)/sigma))
  - (n_in/2) * log sigma2 - s2/(2 sigma2) + theta*s1/sigma2
  - n_in * theta^2 / (2 sigma2),          n_in = P - n_lo - n_hi,

dropping the additive constant.  With no censoring this reduces to the
ordinary Gaussian log-likelihood in (s1, s2).  Tail counts may be real
valued: sanitized counts enter un-rounded after repair, since the expression
is well-defined for real exponents.

Analytic theta-derivatives (a = (lower-theta)/sigma, b = (upper-theta)/sigma,
H-(a) = phi(a)/Phi(a), H+(b) = phi(b)/(1-Phi(b))):

    d/dtheta   = -n_lo*H-(a)/sigma + n_hi*H+(b)/sigma + (s1 - n_in*theta)/sigma2
    d2/dtheta2 = -n_lo*(H-(a)^2 + a*H-(a))/sigma2
                 -n_hi*(H+(b)^2 - b*H+(b))/sigma2 - n_in/sigma2

Both tail terms of the second derivative are negative for all arguments
(Mills-ratio inequalities), so the surface is strictly concave in theta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from . import _kernels
from .errors import InvalidArgument
from .privacy import GlobalBounds

SIGMA2_FLOOR = 1e-8


@dataclass(frozen=True)
class CensoredStats:
    """Statistics feeding the censored likelihood, after repair.

    Invariants: lower < upper, n_lower >= 0, n_upper >= 0,
    n_lower + n_upper <= n_parts - 1.
    """

    lower: float
    upper: float
    s1: float
    s2: float
    n_lower: float
    n_upper: float
    n_parts: int

    def __post_init__(self):
        if not self.lower < self.upper:
            raise InvalidArgument("stats require lower < upper")
        if self.n_lower < 0 or self.n_upper < 0:
            raise InvalidArgument("tail counts must be >= 0")
        if self.n_lower + self.n_upper > self.n_parts - 1:
            raise InvalidArgument("tail counts must leave at least one interior unit")

    @property
    def n_inner(self) -> float:
        return self.n_parts - self.n_lower - self.n_upper


def repair_bounds(lower: float, upper: float, bounds: GlobalBounds):
    """Order sanitized thresholds; widen symmetrically if they collide.

    Returns (lower, upper, repaired_flag).
    """
    repaired = False
    if upper < lower:
        lower, upper = upper, lower
        repaired = True
    if upper <= lower:
        half = 0.5e-6 * bounds.width
        mid = lower
        lower, upper = mid - half, mid + half
        repaired = True
    return float(lower), float(upper), repaired


def repair_counts(n_lower: float, n_upper: float, n_parts: int):
    """Clamp sanitized tail counts to >= 0 and rescale them proportionally
    when they leave no interior mass.  Returns (n_lower, n_upper, repaired)."""
    repaired = False
    nl = float(n_lower)
    nu = float(n_upper)
    if nl < 0.0:
        nl = 0.0
        repaired = True
    if nu < 0.0:
        nu = 0.0
        repaired = True
    total = nl + nu
    if total >= n_parts:
        scale = (n_parts - 1) / total
        nl *= scale
        nu *= scale
        repaired = True
    return nl, nu, repaired


def repair_sums(s1: float, s2: float, n_inner: float, width: float):
    """Keep the likelihood bounded: noise can push the sanitized sum of
    squares below s1^2/n (even negative), in which case the surface diverges
    as sigma2 -> 0 and the posterior is improper.  Raise s2 to the
    Cauchy-Schwarz bound plus a small threshold-scaled margin.
    Returns (s2, repaired_flag)."""
    floor = s1 * s1 / n_inner + n_inner * (0.01 * width) ** 2
    if s2 < floor:
        return floor, True
    return float(s2), False


def _validated(stats: CensoredStats, theta: float, sigma2: float):
    if not math.isfinite(theta):
        raise InvalidArgument(f"theta must be finite, got {theta}")
    if not (math.isfinite(sigma2) and sigma2 > 0.0):
        raise InvalidArgument(f"sigma2 must be finite and > 0, got {sigma2}")
    if stats.n_inner <= 0:
        raise InvalidArgument("likelihood undefined without interior mass")


def censored_loglik(theta: float, sigma2: float, stats: CensoredStats) -> float:
    _validated(stats, theta, sigma2)
    return _kernels.censored_loglik(theta, sigma2, stats.lower, stats.upper,
                                    stats.s1, stats.s2, stats.n_lower,
                                    stats.n_upper, stats.n_parts)


def censored_loglik_dtheta(theta: float, sigma2: float, stats: CensoredStats) -> float:
    _validated(stats, theta, sigma2)
    return _kernels.censored_dll_dtheta(theta, sigma2, stats.lower, stats.upper,
                                        stats.s1, stats.s2, stats.n_lower,
                                        stats.n_upper, stats.n_parts)


def censored_loglik_d2theta(theta: float, sigma2: float, stats: CensoredStats) -> float:
    _validated(stats, theta, sigma2)
    return _kernels.censored_d2ll_dtheta2(theta, sigma2, stats.lower, stats.upper,
                                          stats.s1, stats.s2, stats.n_lower,
                                          stats.n_upper, stats.n_parts)


def moment_init(stats: CensoredStats):
    """Interior-moment starting point (theta0, sigma2_0) for optimizers.

    Sanitization noise can make the moment variance non-positive (or the mean
    leave the threshold interval); such starts sit in regions of enormous
    curvature, so they are replaced by a threshold-scaled default.
    """
    n_in = stats.n_inner
    mean = stats.s1 / n_in
    theta0 = min(max(mean, stats.lower), stats.upper)
    sigma20 = stats.s2 / n_in - mean * mean
    floor = SIGMA2_FLOOR * max(1.0, theta0 * theta0)
    if not sigma20 > floor:
        width = stats.upper - stats.lower
        sigma20 = (0.25 * width) ** 2
    return theta0, sigma20


def scaled(stats: CensoredStats, c: float) -> CensoredStats:
    """Stats of the data multiplied by c > 0 (thresholds and s1 scale by c,
    s2 by c^2); used by covariance checks."""
    if c <= 0:
        raise InvalidArgument("scale factor must be > 0")
    return replace(stats, lower=stats.lower * c, upper=stats.upper * c,
                   s1=stats.s1 * c, s2=stats.s2 * c * c)
