"""Pool repeated sanitized estimates into one inference.

Given m released pairs (theta_h, w_h), the pooled estimate is the mean of
the theta_h; its variance combines the mean within-release variance w with
the between-release sample variance b as b/m + w, referred to a t
distribution with

    nu = (m - 1) * (1 + m*w/b)^2

degrees of freedom.  When b vanishes relative to w the reference collapses
to the normal limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ._tdist import t_cdf, t_ppf
from .errors import InvalidArgument

# below this ratio the between-variance is treated as zero (normal limit)
_B_NEGLIGIBLE = 1e-15


@dataclass(frozen=True)
class CombinedInference:
    estimate: float
    total_var: float
    df: float
    m: int
    w: float
    b: float
    gamma: float
    ci_lower: float
    ci_upper: float
    p_value: float


def combine(passes, gamma: float = 0.95, null: float = 0.0) -> CombinedInference:
    """Pool m >= 2 releases; two-sided p-value tests theta == null."""
    passes = list(passes)
    m = len(passes)
    if m < 2:
        raise InvalidArgument("combining requires at least 2 releases")
    if not 0.0 < gamma < 1.0:
        raise InvalidArgument(f"confidence coefficient must lie in (0, 1), got {gamma}")
    thetas = [p.theta for p in passes]
    ws = [p.w for p in passes]
    if any(w < 0.0 for w in ws):
        raise InvalidArgument("within-release variances must be >= 0")
    mean = math.fsum(thetas) / m
    w = math.fsum(ws) / m
    b = math.fsum((t - mean) ** 2 for t in thetas) / (m - 1)
    total_var = b / m + w
    if b <= _B_NEGLIGIBLE * w or b == 0.0:
        df = math.inf
    else:
        df = (m - 1) * (1.0 + m * w / b) ** 2
    se = math.sqrt(total_var)
    tq = t_ppf(0.5 * (1.0 + gamma), df)
    half = tq * se
    if se > 0.0:
        stat = abs(mean - null) / se
        p_value = 2.0 * t_cdf(-stat, df)
    else:
        p_value = 1.0 if mean == null else 0.0
    return CombinedInference(estimate=mean, total_var=total_var, df=df, m=m,
                             w=w, b=b, gamma=gamma, ci_lower=mean - half,
                             ci_upper=mean + half, p_value=p_value)
