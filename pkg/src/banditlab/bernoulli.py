"""Bernoulli-bandit policies.

Three variants: Beta-Bernoulli Thompson sampling, bootstrap Thompson
sampling over a bank of J online double-or-nothing replicates, and the
J-free variant that resamples stored sufficient statistics each round.
"""

from __future__ import annotations

import numpy as np

from .core import ArmId, argmax_random_tiebreak

WEIGHT_SCHEMES = ("double-or-nothing", "poisson", "exponential")


def _check_binary(reward) -> float:
    r = float(reward)
    if r != 0.0 and r != 1.0:
        raise ValueError("non-binary reward")
    return r


def _check_prior(prior_alpha: float, prior_beta: float) -> None:
    if prior_alpha <= 0 or prior_beta <= 0:
        raise ValueError("invalid Beta shape")


class BetaTsPolicy:
    """Thompson sampling with independent Beta posteriors per arm."""

    def __init__(self, n_arms: int, prior_alpha: float = 1.0, prior_beta: float = 1.0,
                 rng: np.random.Generator | None = None):
        if n_arms < 1:
            raise ValueError("need at least 1 arm")
        _check_prior(prior_alpha, prior_beta)
        self.n_arms = n_arms
        self.alpha = np.full(n_arms, float(prior_alpha))
        self.beta = np.full(n_arms, float(prior_beta))
        self._rng = rng if rng is not None else np.random.default_rng()

    def select(self, context=None) -> ArmId:
        try:
            draws = self._rng.beta(self.alpha, self.beta)
        except ValueError as exc:
            raise ValueError("invalid Beta shape") from exc
        return argmax_random_tiebreak(draws, self._rng)

    def update(self, arm: ArmId, reward) -> None:
        r = _check_binary(reward)
        self.alpha[arm] += r
        self.beta[arm] += 1.0 - r


class BtsPolicy:
    """Bootstrap Thompson sampling over a K x J replicate bank.

    Selection draws one replicate index per arm uniformly and plays the
    argmax of that replicate's posterior-mean estimate. Each update flips
    one fair coin per replicate and adds the observation only to the
    replicates whose coin came up heads, so replicate j's pseudo-count
    increment after n pulls is Binomial(n, 1/2).

    ``coin_draws`` counts weight evaluations: exactly J per update,
    independent of how many steps have elapsed.
    """

    def __init__(self, n_arms: int, n_replicates: int,
                 prior_alpha: float = 1.0, prior_beta: float = 1.0,
                 rng: np.random.Generator | None = None,
                 weight_rng: np.random.Generator | None = None,
                 weights: str = "double-or-nothing"):
        if n_arms < 1:
            raise ValueError("need at least 1 arm")
        if n_replicates < 1:
            raise ValueError("need at least 1 replicate")
        if weights not in WEIGHT_SCHEMES:
            raise ValueError(f"unknown weight scheme {weights!r}; expected one of {WEIGHT_SCHEMES}")
        _check_prior(prior_alpha, prior_beta)
        self.n_arms = n_arms
        self.n_replicates = n_replicates
        self.alpha = np.full((n_arms, n_replicates), float(prior_alpha))
        self.beta = np.full((n_arms, n_replicates), float(prior_beta))
        self.weights = weights
        self.coin_draws = 0
        self._rng = rng if rng is not None else np.random.default_rng()
        self._weight_rng = weight_rng if weight_rng is not None else np.random.default_rng()
        self._arm_index = np.arange(n_arms)
        # One fair bit per replicate; unpacked from raw bytes.
        self._n_weight_bytes = (n_replicates + 7) // 8

    def select(self, context=None) -> ArmId:
        j = self._rng.integers(0, self.n_replicates, size=self.n_arms)
        a = self.alpha[self._arm_index, j]
        b = self.beta[self._arm_index, j]
        return argmax_random_tiebreak(a / (a + b), self._rng)

    def _draw_weights(self) -> np.ndarray:
        if self.weights == "double-or-nothing":
            raw = np.frombuffer(self._weight_rng.bytes(self._n_weight_bytes), dtype=np.uint8)
            return np.unpackbits(raw)[: self.n_replicates]
        if self.weights == "poisson":
            return self._weight_rng.poisson(1.0, self.n_replicates)
        return self._weight_rng.exponential(1.0, self.n_replicates)

    def update(self, arm: ArmId, reward) -> None:
        r = _check_binary(reward)
        w = self._draw_weights()
        self.coin_draws += self.n_replicates
        # r is 0 or 1, so only one side of (alpha += w*r, beta += w*(1-r))
        # is nonzero; skip the dead half.
        if r:
            self.alpha[arm] += w
        else:
            self.beta[arm] += w


class BtsInfPolicy:
    """Bootstrap Thompson sampling without a replicate bank.

    Stores per-arm success/failure counts and draws a fresh
    double-or-nothing replicate every selection by binomial thinning:
    s* ~ Binomial(s, 1/2), f* ~ Binomial(f, 1/2). Equivalent to the bank
    policy in the limit of infinitely many replicates. Thinning uses exact
    binomial sampling; small counts dominate early rounds, where a normal
    approximation would misbehave.
    """

    def __init__(self, n_arms: int, prior_alpha: float = 1.0, prior_beta: float = 1.0,
                 rng: np.random.Generator | None = None):
        if n_arms < 1:
            raise ValueError("need at least 1 arm")
        _check_prior(prior_alpha, prior_beta)
        self.n_arms = n_arms
        self.prior_alpha = float(prior_alpha)
        self.prior_beta = float(prior_beta)
        self.successes = np.zeros(n_arms, dtype=np.int64)
        self.failures = np.zeros(n_arms, dtype=np.int64)
        self._rng = rng if rng is not None else np.random.default_rng()

    def select(self, context=None) -> ArmId:
        s_star = self._rng.binomial(self.successes, 0.5)
        f_star = self._rng.binomial(self.failures, 0.5)
        est = (self.prior_alpha + s_star) / (
            self.prior_alpha + self.prior_beta + s_star + f_star
        )
        return argmax_random_tiebreak(est, self._rng)

    def update(self, arm: ArmId, reward) -> None:
        r = _check_binary(reward)
        if r:
            self.successes[arm] += 1
        else:
            self.failures[arm] += 1
