"""Differentially private sample quantiles via exponential-mechanism gap selection.

Given sorted data z_(1) <= ... <= z_(P) inside known bounds (L, U), extend
with z_(0) = L, z_(P+1) = U and assign each gap j = 0..P the weight

    (z_(j+1) - z_(j)) * exp(-eps * |j - q*P|).

An index j* is drawn from the inter-order-statistic gaps j = 1..P-1 with
probability proportional to its weight and the output is uniform inside the
selected gap, hence always within [z_(1), z_(P)].  The two boundary gaps
next to L and U are excluded from selection: they are typically orders of
magnitude wider than the data gaps, and at small eps they would swallow
nearly all the selection mass and destroy the release.  When every
selectable gap has zero width (fewer than 3 distinct values), the fallback
is the plain order statistic z_(ceil(q*P)) clamped inside (L, U).

A zCDP budget is spent through the exponential mechanism at
eps = 2*sqrt(2*rho).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument
from .privacy import GlobalBounds, PrivacyBudget, exp_mech_epsilon


@dataclass(frozen=True)
class QuantileRequest:
    q: float
    bounds: GlobalBounds
    budget: PrivacyBudget

    def __post_init__(self):
        q = float(self.q)
        if not 0.0 < q < 1.0:
            raise InvalidArgument(f"q must lie in (0, 1), got {q}")
        object.__setattr__(self, "q", q)


def order_statistic_index(q: float, n: int) -> int:
    """1-based index ceil(q*n), guarded against floating-point excess.

    The product q*n can land an ulp above an integer (e.g. 0.1*100); a small
    backoff keeps the intended ceiling.
    """
    x = q * n
    return max(1, min(n, int(math.ceil(x - 1e-9 * max(1.0, abs(x))))))


def selection_weights(z: np.ndarray, q: float, eps: float,
                      bounds: GlobalBounds) -> np.ndarray:
    """Gap weights for all P+1 gaps of a sorted, in-bounds vector."""
    z = np.asarray(z, dtype=float)
    if z.ndim != 1 or z.size < 1:
        raise InvalidArgument("z must be a non-empty 1-d vector")
    if np.any(np.diff(z) < 0):
        raise InvalidArgument("z must be sorted ascending")
    if not bounds.contains(z):
        raise InvalidArgument("z must lie within the global bounds")
    log_w = _log_weights(z, q, eps, bounds)
    return np.exp(log_w)


def _log_weights(z: np.ndarray, q: float, eps: float,
                 bounds: GlobalBounds) -> np.ndarray:
    n = z.size
    ext = np.concatenate(([bounds.lower], z, [bounds.upper]))
    gaps = np.diff(ext)
    dist = np.abs(np.arange(n + 1, dtype=float) - q * n)
    with np.errstate(divide="ignore"):
        log_w = np.where(gaps > 0.0, np.log(np.maximum(gaps, 1e-300)), -np.inf)
    return log_w - eps * dist


def private_quantile(z: np.ndarray, req: QuantileRequest,
                     rng: np.random.Generator) -> float:
    """One differentially private quantile draw; always inside (L, U)."""
    z = np.asarray(z, dtype=float)
    if z.ndim != 1 or z.size < 1:
        raise InvalidArgument("z must be a non-empty 1-d vector")
    if not np.all(np.isfinite(z)):
        raise InvalidArgument("z must be finite")
    eps = exp_mech_epsilon(req.budget)
    bounds = req.bounds
    zs = np.sort(z)
    if not bounds.contains(zs):
        raise InvalidArgument("z must lie within the global bounds")
    log_w = _log_weights(zs, req.q, eps, bounds)[1:-1]  # gaps j = 1..P-1
    top = np.max(log_w) if log_w.size else -np.inf
    if not np.isfinite(top):
        # every selectable gap has zero width: fall back to the plain order
        # statistic, clamped into the open interval
        k = order_statistic_index(req.q, zs.size)
        val = zs[k - 1]
        lo = math.nextafter(bounds.lower, bounds.upper)
        hi = math.nextafter(bounds.upper, bounds.lower)
        return float(min(max(val, lo), hi))
    p = np.exp(log_w - top)
    p /= p.sum()
    cdf = np.cumsum(p)
    j = int(np.searchsorted(cdf, rng.random(), side="right")) + 1
    j = min(j, zs.size - 1)
    return float(zs[j - 1] + (zs[j] - zs[j - 1]) * rng.random())
