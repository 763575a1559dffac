"""Partitioning two raw groups into paired block-mean differences, and
double-censoring those differences at given thresholds.

The partition-level difference vector z has one entry per partition:
z_j = mean(block j of group 1) - mean(block j of group 0), with both groups
independently permuted and chunked into equal blocks, paired by index.
Censoring records out-of-threshold entries as (threshold, flag) pairs with
flag -1 (low), 0 (interior), +1 (high); equality with a threshold counts as
censored on that side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDataError, InvalidArgument
from .quantile import order_statistic_index


@dataclass(frozen=True)
class PartitionConfig:
    n_parts: int
    n1: int
    n0: int

    def __post_init__(self):
        if self.n_parts < 1:
            raise InvalidArgument("number of partitions must be >= 1")
        if self.n_parts > min(self.n1, self.n0):
            raise InvalidArgument("more partitions than observations in a group")
        if self.n1 % self.n_parts or self.n0 % self.n_parts:
            raise InvalidArgument(
                f"group sizes ({self.n1}, {self.n0}) must be divisible by "
                f"n_parts={self.n_parts}; trim_to_divisible() drops a random remainder")


def trim_to_divisible(y: np.ndarray, n_parts: int,
                      rng: np.random.Generator) -> np.ndarray:
    """Drop a uniformly random remainder so len(y) becomes divisible."""
    y = np.asarray(y, dtype=float)
    r = y.size % n_parts
    if r == 0:
        return y
    keep = np.sort(rng.permutation(y.size)[: y.size - r])
    return y[keep]


def partition_and_difference(y1: np.ndarray, y0: np.ndarray, n_parts: int,
                             rng: np.random.Generator) -> np.ndarray:
    """Per-partition mean differences of two independently permuted groups."""
    y1 = np.asarray(y1, dtype=float)
    y0 = np.asarray(y0, dtype=float)
    if y1.ndim != 1 or y0.ndim != 1:
        raise InvalidArgument("groups must be 1-d vectors")
    if not (np.all(np.isfinite(y1)) and np.all(np.isfinite(y0))):
        raise InvalidArgument("group data must be finite")
    cfg = PartitionConfig(n_parts, y1.size, y0.size)
    p1 = y1[rng.permutation(y1.size)]
    p0 = y0[rng.permutation(y0.size)]
    m1 = p1.reshape(cfg.n_parts, -1).mean(axis=1)
    m0 = p0.reshape(cfg.n_parts, -1).mean(axis=1)
    return m1 - m0


def sample_quantile(z: np.ndarray, q: float) -> float:
    """The order statistic z_(ceil(q*P)), 1-indexed; the repo-wide convention."""
    z = np.asarray(z, dtype=float)
    if z.size < 1:
        raise InvalidArgument("z must be non-empty")
    if not 0.0 < q < 1.0:
        raise InvalidArgument(f"q must lie in (0, 1), got {q}")
    k = order_statistic_index(q, z.size)
    return float(np.sort(z)[k - 1])


def validate_censoring_rates(alpha: float, beta: float) -> None:
    if not (0.0 < alpha < 1.0 and 0.0 < beta < 1.0):
        raise InvalidArgument("censoring rates must lie in (0, 1)")
    if alpha + beta >= 1.0:
        raise InvalidArgument(f"alpha + beta must be < 1, got {alpha + beta}")
    if 1.25 * alpha + beta >= 1.0:
        raise InvalidArgument(
            f"censoring rates must satisfy 5*alpha/4 + beta < 1, "
            f"got alpha={alpha}, beta={beta}")


@dataclass(frozen=True)
class CensoredData:
    """Doubly censored partition differences.

    values[j] equals lower where flags[j] == -1, upper where flags[j] == +1,
    and the raw z_j where flags[j] == 0.  alpha and beta are the target
    censoring proportions that produced the thresholds.
    """

    lower: float
    upper: float
    values: np.ndarray
    flags: np.ndarray
    alpha: float
    beta: float

    def __post_init__(self):
        if not self.lower < self.upper:
            raise InvalidArgument("censoring thresholds require lower < upper")
        validate_censoring_rates(self.alpha, self.beta)
        v, f = self.values, self.flags
        if v.shape != f.shape or v.ndim != 1:
            raise InvalidArgument("values and flags must be 1-d and congruent")
        if not (np.all(v[f == -1] == self.lower) and np.all(v[f == 1] == self.upper)):
            raise InvalidArgument("censored entries must sit exactly on a threshold")
        inner = v[f == 0]
        if inner.size and not np.all((inner > self.lower) & (inner < self.upper)):
            raise InvalidArgument("interior entries must lie strictly inside the thresholds")

    @property
    def n_parts(self) -> int:
        return int(self.values.size)

    @property
    def n_lower(self) -> int:
        return int(np.count_nonzero(self.flags == -1))

    @property
    def n_upper(self) -> int:
        return int(np.count_nonzero(self.flags == 1))

    @property
    def n_inner(self) -> int:
        return self.n_parts - self.n_lower - self.n_upper


def censor(z: np.ndarray, lower: float, upper: float,
           alpha: float, beta: float) -> CensoredData:
    """Map each z_j to (threshold, flag) per the weak-inequality rule."""
    z = np.asarray(z, dtype=float)
    if not lower < upper:
        raise InvalidArgument(f"censoring requires lower < upper, got ({lower}, {upper})")
    flags = np.zeros(z.shape, dtype=np.int8)
    flags[z <= lower] = -1
    flags[z >= upper] = 1
    values = np.where(flags == -1, lower, np.where(flags == 1, upper, z))
    values.setflags(write=False)
    flags.setflags(write=False)
    return CensoredData(float(lower), float(upper), values, flags,
                        float(alpha), float(beta))


def recompute_with_sanitized_bounds(z: np.ndarray, lower: float, upper: float,
                                    alpha: float, beta: float) -> CensoredData:
    """Re-censor raw differences at sanitized thresholds.

    Identical to ``censor``; the separate name marks the second pass of the
    recensoring estimator variants, whose outputs must be sanitized again
    before release.
    """
    return censor(z, lower, upper, alpha, beta)


@dataclass(frozen=True)
class CensoredSummaries:
    """Sufficient statistics of censored data: interior sum and sum of
    squares, thresholds, and tail counts."""

    s1: float
    s2: float
    lower: float
    upper: float
    n_lower: int
    n_upper: int
    n_parts: int

    @property
    def n_inner(self) -> int:
        return self.n_parts - self.n_lower - self.n_upper


def censored_summaries(d: CensoredData) -> CensoredSummaries:
    inner = d.values[d.flags == 0]
    # fsum: correctly rounded, order-independent sums
    s1 = math.fsum(inner.tolist())
    s2 = math.fsum((inner * inner).tolist())
    return CensoredSummaries(s1, s2, d.lower, d.upper,
                             d.n_lower, d.n_upper, d.n_parts)


def censor_at_sample_quantiles(z: np.ndarray, alpha: float, beta: float) -> CensoredData:
    """Censor at the sample quantiles z_(ceil(alpha*P)) and z_(ceil((1-beta)*P))."""
    lo = sample_quantile(z, alpha)
    hi = sample_quantile(z, 1.0 - beta)
    if not lo < hi:
        raise DegenerateDataError(
            "sample quantiles coincide; the data are too discrete to censor")
    return censor(z, lo, hi, alpha, beta)
