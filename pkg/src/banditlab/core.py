"""Shared plumbing for bandit policies and simulations.

Random-number streams are derived, never shared: every consumer of
randomness (environment, policy, replicate weights) gets its own
counter-based generator keyed by (master_seed, run_index, role), so any
episode is reproducible bit-for-bit regardless of scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

ArmId = int
Reward = float

# Stable role codes; changing these changes every derived stream.
STREAM_ROLES = {"environment": 0, "policy": 1, "replicate-weights": 2}


@dataclass(frozen=True)
class RngStreamKey:
    """Address of one independent random stream.

    Distinct (master_seed, run_index, role) triples give statistically
    independent streams; equal triples give identical streams.
    """

    master_seed: int
    run_index: int
    role: str

    def __post_init__(self) -> None:
        if self.role not in STREAM_ROLES:
            raise ValueError(
                f"unknown stream role {self.role!r}; expected one of {sorted(STREAM_ROLES)}"
            )
        if self.run_index < 0:
            raise ValueError("run_index must be non-negative")


def derive_stream(key: RngStreamKey) -> np.random.Generator:
    """Return the deterministic generator addressed by ``key``.

    Philox is counter-based, so streams for different keys never collide
    and derivation order is irrelevant.
    """
    seq = np.random.SeedSequence(
        entropy=key.master_seed,
        spawn_key=(key.run_index, STREAM_ROLES[key.role]),
    )
    return np.random.Generator(np.random.Philox(seq))


class StepRecord(NamedTuple):
    """One simulation step; kept only when full traces are requested."""

    t: int
    arm: ArmId
    reward: Reward
    counterfactual_optimal: Reward


def argmax_random_tiebreak(values, rng: np.random.Generator) -> int:
    """Index of a maximal element, ties resolved uniformly at random.

    The first step of any bootstrap/posterior policy starts with all-equal
    estimates, so the uniform tie-break carries real statistical weight
    rather than being a formality.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("empty candidate set")
    top = arr.max()
    if np.isnan(top):
        raise ValueError("non-finite value")
    tied = np.flatnonzero(arr == top)
    if tied.size == 1:
        return int(tied[0])
    return int(tied[rng.integers(tied.size)])
