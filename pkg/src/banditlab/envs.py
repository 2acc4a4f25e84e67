"""Benchmark reward generators with coupled counterfactuals.

Both environments consume exactly one base random draw per pull and
derive the played arm's reward and the optimal arm's counterfactual
reward from that same draw, so regret increments are exact under common
random numbers: pulling the optimal arm gives zero regret every step.
"""

from __future__ import annotations

from typing import NamedTuple, Optional

import numpy as np

from .core import ArmId, Reward


class PullOutcome(NamedTuple):
    reward: Reward
    counterfactual_optimal: Reward


class BernoulliEnv:
    """K arms; one arm has success probability 0.5, the rest 0.5 - epsilon."""

    def __init__(self, n_arms: int, epsilon: float, optimal: ArmId = 0):
        if n_arms < 2:
            raise ValueError("need at least 2 arms")
        if not 0.0 < epsilon < 0.5:
            raise ValueError("epsilon must lie in (0, 0.5)")
        if not 0 <= optimal < n_arms:
            raise ValueError("optimal arm index out of range")
        means = np.full(n_arms, 0.5 - epsilon)
        means[optimal] = 0.5
        self.n_arms = n_arms
        self.epsilon = epsilon
        self.optimal = optimal
        self.means = means
        self._optimal_mean = 0.5

    def context(self) -> None:
        return None

    def pull(self, arm: ArmId, rng: np.random.Generator) -> PullOutcome:
        # One uniform thresholds both the factual and counterfactual reward.
        u = rng.random()
        return PullOutcome(
            float(u < self.means[arm]),
            float(u < self._optimal_mean),
        )


# Full-factorial cells in row order (x1, x2, x3); this ordering fixes the
# arm numbering every reported mean/variance refers to.
FACTORIAL_CELLS = (
    (0, 0, 0),
    (1, 0, 0),
    (0, 1, 0),
    (1, 1, 0),
    (0, 0, 1),
    (1, 0, 1),
    (0, 1, 1),
    (1, 1, 1),
)

# Coefficients: intercept, x1, x2, x3, x1x2, x1x3, x2x3, x1x2x3.
FACTORIAL_COEFFICIENTS = np.array([1.00, -0.20, 0.10, 0.20, 0.10, 0.05, 0.10, 0.01])


def full_factorial_design() -> np.ndarray:
    """8x8 binary design: intercept, main effects, and all interactions."""
    rows = []
    for x1, x2, x3 in FACTORIAL_CELLS:
        rows.append([1, x1, x2, x3, x1 * x2, x1 * x3, x2 * x3, x1 * x2 * x3])
    return np.array(rows, dtype=np.float64)


class FactorialEnv:
    """2^3 factorial Gaussian bandit with gamma-scaled heteroscedasticity.

    Reward for arm a is N(x_a @ beta, x_a @ sigma2) where sigma2 places
    weight gamma on the x3 and three-way-interaction columns, so arms with
    x3=1 get variance 1 + gamma (1 + 2*gamma for the all-ones arm).
    """

    def __init__(self, gamma: float):
        if gamma < 0:
            raise ValueError("gamma must be non-negative")
        X = full_factorial_design()
        sigma2 = np.array([1.0, 0.0, 0.0, gamma, 0.0, 0.0, 0.0, gamma])
        self.gamma = gamma
        self.design = X
        self.coefficients = FACTORIAL_COEFFICIENTS.copy()
        self.means = X @ self.coefficients
        self.variances = X @ sigma2
        self.n_arms = X.shape[0]
        self.optimal = int(np.argmax(self.means))
        self._sds = np.sqrt(self.variances)
        self._optimal_mean = self.means[self.optimal]
        self._optimal_sd = self._sds[self.optimal]

    def context(self) -> np.ndarray:
        return self.design

    def pull(self, arm: ArmId, rng: np.random.Generator) -> PullOutcome:
        # The shared z makes the counterfactual well-defined even though
        # arm variances differ.
        z = rng.standard_normal()
        return PullOutcome(
            float(self.means[arm] + self._sds[arm] * z),
            float(self._optimal_mean + self._optimal_sd * z),
        )
