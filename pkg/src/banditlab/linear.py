"""Linear-model policies for the factorial Gaussian bandit.

Both policies keep summation-form sufficient statistics (A = lambda*I +
sum x x^T, b = sum x y) and solve for coefficients on demand with an SPD
factorization, which doubles as the positive-definiteness check at every
decision. The bootstrap variant keeps J such accumulators and updates
each with probability 1/2 per observation; selection solves one
uniformly chosen replicate for the whole coefficient vector (a single
shared draw per round, unlike the per-arm replicate draws of the
Bernoulli bank policy).
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import cho_solve, solve_triangular

from .core import ArmId, argmax_random_tiebreak


def _spd_solve(A: np.ndarray, b: np.ndarray, error: str) -> np.ndarray:
    try:
        chol = np.linalg.cholesky(A)
    except np.linalg.LinAlgError as exc:
        raise ValueError(error) from exc
    return cho_solve((chol, True), b, check_finite=False)


class RidgeAccumulator:
    """Online ridge regression state: A = lambda*I + sum x x^T, b = sum x y."""

    def __init__(self, dim: int, ridge: float = 1.0):
        if dim < 1:
            raise ValueError("dimension must be positive")
        if ridge <= 0:
            raise ValueError("ridge penalty must be positive")
        self.dim = dim
        self.ridge = float(ridge)
        self.A = self.ridge * np.eye(dim)
        self.b = np.zeros(dim)

    @classmethod
    def _wrap(cls, A: np.ndarray, b: np.ndarray, ridge: float) -> "RidgeAccumulator":
        # Shares storage with the caller; used for replicate views.
        acc = cls.__new__(cls)
        acc.dim = b.shape[0]
        acc.ridge = float(ridge)
        acc.A = A
        acc.b = b
        return acc

    def update(self, x, y: float) -> None:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.dim,):
            raise ValueError("dimension mismatch")
        self.A += np.outer(x, x)
        self.b += float(y) * x

    def point(self) -> np.ndarray:
        """Solve A theta = b; raises if A lost positive definiteness."""
        return _spd_solve(self.A, self.b, "accumulator not positive definite")


class LinearBtsPolicy:
    """Bootstrap Thompson sampling for a linear reward model.

    ``arms`` is the static K x d design matrix whose row a is the feature
    vector of arm a. Replicates are stored stacked as (J, d, d) and (J, d)
    arrays; ``replicate(j)`` exposes any single one as a RidgeAccumulator
    view without copying.
    """

    def __init__(self, arms, n_replicates: int, ridge: float = 1.0,
                 rng: np.random.Generator | None = None,
                 weight_rng: np.random.Generator | None = None):
        arms = np.asarray(arms, dtype=np.float64)
        if arms.ndim != 2 or arms.shape[0] < 1:
            raise ValueError("arm design must be a non-empty 2-D matrix")
        if n_replicates < 1:
            raise ValueError("need at least 1 replicate")
        if ridge <= 0:
            raise ValueError("ridge penalty must be positive")
        self.arms = arms
        self.n_arms, self.dim = arms.shape
        self.n_replicates = n_replicates
        self.ridge = float(ridge)
        self._A = np.tile(self.ridge * np.eye(self.dim), (n_replicates, 1, 1))
        self._b = np.zeros((n_replicates, self.dim))
        self.coin_draws = 0
        self._rng = rng if rng is not None else np.random.default_rng()
        self._weight_rng = weight_rng if weight_rng is not None else np.random.default_rng()
        self._n_weight_bytes = (n_replicates + 7) // 8

    def replicate(self, j: int) -> RidgeAccumulator:
        return RidgeAccumulator._wrap(self._A[j], self._b[j], self.ridge)

    @property
    def replicates(self) -> list[RidgeAccumulator]:
        return [self.replicate(j) for j in range(self.n_replicates)]

    def select(self, context=None) -> ArmId:
        X = self.arms if context is None else np.asarray(context, dtype=np.float64)
        j = int(self._rng.integers(self.n_replicates))
        theta = _spd_solve(self._A[j], self._b[j], "accumulator not positive definite")
        return argmax_random_tiebreak(X @ theta, self._rng)

    def observe(self, x, y: float) -> None:
        """Feed one (features, reward) pair through the replicate coins."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.dim,):
            raise ValueError("dimension mismatch")
        raw = np.frombuffer(self._weight_rng.bytes(self._n_weight_bytes), dtype=np.uint8)
        accept = np.unpackbits(raw)[: self.n_replicates] != 0
        self.coin_draws += self.n_replicates
        self._A[accept] += np.outer(x, x)
        self._b[accept] += float(y) * x

    def update(self, arm: ArmId, reward: float) -> None:
        self.observe(self.arms[arm], reward)


class BayesLinearTsPolicy:
    """Thompson sampling under a conjugate Gaussian linear model.

    Standard-normal prior on coefficients, noise variance fixed at 1, so
    the posterior after (X, y) is N(A^-1 b, A^-1) with A = I + X^T X and
    b = X^T y; the posterior mean coincides with a unit-ridge point
    estimate on the same data. The online update and a full refit are
    exactly equivalent here.
    """

    noise_variance = 1.0

    def __init__(self, arms, rng: np.random.Generator | None = None):
        arms = np.asarray(arms, dtype=np.float64)
        if arms.ndim != 2 or arms.shape[0] < 1:
            raise ValueError("arm design must be a non-empty 2-D matrix")
        self.arms = arms
        self.n_arms, self.dim = arms.shape
        self.A = np.eye(self.dim)
        self.b = np.zeros(self.dim)
        self._rng = rng if rng is not None else np.random.default_rng()

    def posterior_mean(self) -> np.ndarray:
        return _spd_solve(self.A, self.b, "precision matrix not positive definite")

    def sample_coefficients(self) -> np.ndarray:
        """One draw from N(A^-1 b, A^-1) via the Cholesky factor of A."""
        try:
            chol = np.linalg.cholesky(self.A)
        except np.linalg.LinAlgError as exc:
            raise ValueError("precision matrix not positive definite") from exc
        mean = cho_solve((chol, True), self.b, check_finite=False)
        z = self._rng.standard_normal(self.dim)
        # Solving L^T u = z gives Cov(u) = (L L^T)^-1 = A^-1.
        u = solve_triangular(chol, z, trans="T", lower=True, check_finite=False)
        return mean + u

    def select(self, context=None) -> ArmId:
        X = self.arms if context is None else np.asarray(context, dtype=np.float64)
        return argmax_random_tiebreak(X @ self.sample_coefficients(), self._rng)

    def observe(self, x, y: float) -> None:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.dim,):
            raise ValueError("dimension mismatch")
        self.A += np.outer(x, x)
        self.b += float(y) * x

    def update(self, arm: ArmId, reward: float) -> None:
        self.observe(self.arms[arm], reward)
