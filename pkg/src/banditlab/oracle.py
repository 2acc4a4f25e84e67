"""Exact reference distributions for the double-or-nothing bootstrap.

For Bernoulli data the double-or-nothing resample keeps each of s
successes and f failures independently with probability 1/2, so the
resampled counts are s* ~ Binomial(s, 1/2) and f* ~ Binomial(f, 1/2) and
every functional of (s*, f*) has an exactly enumerable distribution at
small n. These enumerations serve as ground truth for the sampling-based
policies and as the data behind the bootstrap-versus-Beta comparison.

Estimator values are merged under exact rational keys, so two weight
patterns yielding the same estimate (e.g. (0,0) and (1,1) both giving
1/2 on one success plus one failure) collapse into one support point
with no floating-point tolerance games; probabilities are accumulated
in double precision with compensated summation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import stats

# Enumeration is O(n^3) in the worst case; past this size use sampling.
MAX_ENUMERATION_N = 256

# Cell-group count for the pmf-versus-Beta comparison metric.
_EQUAL_MASS_GROUPS = 8


@dataclass(frozen=True, eq=False)
class DiscretePmf:
    """A finite distribution: strictly increasing support, probs summing to 1."""

    support: np.ndarray
    probs: np.ndarray

    def __post_init__(self) -> None:
        support = np.asarray(self.support, dtype=np.float64)
        probs = np.asarray(self.probs, dtype=np.float64)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "probs", probs)
        if support.ndim != 1 or support.shape != probs.shape or support.size == 0:
            raise ValueError("support and probs must be matching non-empty vectors")
        if np.any(np.diff(support) <= 0):
            raise ValueError("support must be strictly increasing")
        if np.any(probs < 0):
            raise ValueError("probabilities must be non-negative")
        total = math.fsum(probs.tolist())
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {total!r}, not 1")

    def mean(self) -> float:
        return math.fsum((self.support * self.probs).tolist())


@dataclass(frozen=True)
class EstimatorMode:
    """How a resample (s*, f*) is turned into a point estimate.

    ``prior-regularized`` computes (a0 + s*) / (a0 + b0 + s* + f*), the
    per-replicate estimate of the bank policy; an empty resample simply
    returns the prior mean. ``pure-mean`` computes s* / (s* + f*)
    conditioned on the resample being nonempty.
    """

    kind: str
    prior_alpha: float = 1.0
    prior_beta: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in ("prior-regularized", "pure-mean"):
            raise ValueError(f"unknown estimator mode {self.kind!r}")
        if self.kind == "prior-regularized" and (self.prior_alpha <= 0 or self.prior_beta <= 0):
            raise ValueError("invalid Beta shape")

    @classmethod
    def prior_regularized(cls, prior_alpha: float = 1.0, prior_beta: float = 1.0) -> "EstimatorMode":
        return cls("prior-regularized", prior_alpha, prior_beta)

    @classmethod
    def pure_mean(cls) -> "EstimatorMode":
        return cls("pure-mean")


def _enumerate_resample(s: int, f: int, mode: EstimatorMode, out: dict, scale: float) -> None:
    """Add the (s, f) resample distribution, weighted by scale, into out.

    Keys are exact Fractions; values are lists of float contributions to
    be compensated-summed by the caller.
    """
    half_s = 0.5 ** s
    half_f = 0.5 ** f
    pure = mode.kind == "pure-mean"
    if pure:
        # Condition each stratum on a nonempty resample.
        scale = scale / (1.0 - 0.5 ** (s + f))
    else:
        a0 = Fraction(mode.prior_alpha)
        denom0 = a0 + Fraction(mode.prior_beta)
    for ss in range(s + 1):
        p_s = math.comb(s, ss) * half_s
        for ff in range(f + 1):
            if pure:
                if ss + ff == 0:
                    continue
                value = Fraction(ss, ss + ff)
            else:
                value = (a0 + ss) / (denom0 + ss + ff)
            p = scale * p_s * math.comb(f, ff) * half_f
            out.setdefault(value, []).append(p)


def _collect(accum: dict) -> DiscretePmf:
    support = sorted(accum)
    return DiscretePmf(
        np.array([float(v) for v in support]),
        np.array([math.fsum(accum[v]) for v in support]),
    )


def donb_pmf_fixed_data(s: int, f: int, mode: EstimatorMode) -> DiscretePmf:
    """Exact estimator distribution under resampling of fixed data.

    ``s`` successes and ``f`` failures are each kept with probability 1/2;
    the estimate is formed per ``mode``. Equal estimate values from
    different (s*, f*) patterns are merged exactly.
    """
    if s < 0 or f < 0:
        raise ValueError("counts must be non-negative")
    if s + f == 0:
        raise ValueError("no data")
    if s + f > MAX_ENUMERATION_N:
        raise ValueError(f"enumeration supports at most n={MAX_ENUMERATION_N} observations")
    accum: dict = {}
    _enumerate_resample(s, f, mode, accum, 1.0)
    return _collect(accum)


def expected_donb_pmf(n: int, theta: float, mode: EstimatorMode) -> DiscretePmf:
    """Estimator distribution averaged over datasets of size n.

    Mixture over s ~ Binomial(n, theta) of the fixed-data distribution on
    (s, n - s): the anticipated bootstrap distribution before any data
    are seen.
    """
    if n < 1:
        raise ValueError("need at least one observation")
    if n > MAX_ENUMERATION_N:
        raise ValueError(f"enumeration supports at most n={MAX_ENUMERATION_N} observations")
    if not 0.0 < theta < 1.0:
        raise ValueError("theta must lie strictly between 0 and 1")
    accum: dict = {}
    for s in range(n + 1):
        weight = math.comb(n, s) * theta ** s * (1.0 - theta) ** (n - s)
        _enumerate_resample(s, n - s, mode, accum, weight)
    return _collect(accum)


def beta_reference_density(theta: float, n: int, grid) -> np.ndarray:
    """Density of Beta(theta*n, (1-theta)*n) on the given grid."""
    a = theta * n
    b = (1.0 - theta) * n
    if a <= 0 or b <= 0:
        raise ValueError("invalid shape")
    return stats.beta.pdf(np.asarray(grid, dtype=np.float64), a, b)


def distribution_distance(pmf: DiscretePmf, theta: float, n: int) -> float:
    """Total-variation distance between a pmf and its Beta reference.

    The continuous Beta(theta*n, (1-theta)*n) is discretized onto cells
    bounded by the pmf's own support values ([0, v0], then (v_{k-1}, v_k]);
    Beta mass above the top support value has no discrete counterpart and
    counts fully toward the distance. Consecutive cells are then pooled
    left-to-right into at most 8 roughly equal-Beta-mass groups (a group
    closes once it holds 1/8 of the Beta mass; the last group absorbs the
    remainder), so the comparison measures where probability mass sits
    rather than how finely the discrete support happens to be shredded.
    Identical distributions score exactly 0; disjoint ones score 1.
    """
    a = theta * n
    b = (1.0 - theta) * n
    if a <= 0 or b <= 0:
        raise ValueError("invalid shape")
    support = pmf.support
    probs = pmf.probs
    cdf = stats.beta.cdf(support, a, b)
    cell_mass = np.diff(np.concatenate(([0.0], cdf)))
    residual = 1.0 - cdf[-1]
    k = support.size
    if k <= _EQUAL_MASS_GROUPS:
        return 0.5 * (float(np.abs(probs - cell_mass).sum()) + residual)
    target = 1.0 / _EQUAL_MASS_GROUPS
    grouped_p = []
    grouped_q = []
    acc_p = 0.0
    acc_q = 0.0
    for i in range(k):
        acc_p += probs[i]
        acc_q += cell_mass[i]
        if acc_q >= target and i < k - 1:
            grouped_p.append(acc_p)
            grouped_q.append(acc_q)
            acc_p = 0.0
            acc_q = 0.0
    grouped_p.append(acc_p)
    grouped_q.append(acc_q)
    diff = np.abs(np.array(grouped_p) - np.array(grouped_q)).sum()
    return 0.5 * (float(diff) + residual)
