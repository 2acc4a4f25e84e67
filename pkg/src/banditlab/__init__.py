"""Bandit policies with bootstrap Thompson sampling and a simulation harness."""

from .bernoulli import BetaTsPolicy, BtsInfPolicy, BtsPolicy
from .core import RngStreamKey, StepRecord, argmax_random_tiebreak, derive_stream
from .envs import BernoulliEnv, FactorialEnv, PullOutcome, full_factorial_design
from .linear import BayesLinearTsPolicy, LinearBtsPolicy, RidgeAccumulator
from .oracle import (
    DiscretePmf,
    EstimatorMode,
    beta_reference_density,
    distribution_distance,
    donb_pmf_fixed_data,
    expected_donb_pmf,
)
from .runner import (
    AggregateCurve,
    ComparisonResult,
    ConfigurationError,
    EnvSpec,
    ExperimentConfig,
    ExperimentResult,
    PolicySpec,
    RegretTrace,
    geometric_checkpoints,
    preset,
    run_episode,
    run_experiment,
    run_paired_comparison,
)
from .results import write_results

__version__ = "0.1.0"

__all__ = [
    "AggregateCurve",
    "BayesLinearTsPolicy",
    "BernoulliEnv",
    "BetaTsPolicy",
    "BtsInfPolicy",
    "BtsPolicy",
    "ComparisonResult",
    "ConfigurationError",
    "DiscretePmf",
    "EnvSpec",
    "EstimatorMode",
    "ExperimentConfig",
    "ExperimentResult",
    "FactorialEnv",
    "LinearBtsPolicy",
    "PolicySpec",
    "PullOutcome",
    "RegretTrace",
    "RidgeAccumulator",
    "RngStreamKey",
    "StepRecord",
    "argmax_random_tiebreak",
    "beta_reference_density",
    "derive_stream",
    "distribution_distance",
    "donb_pmf_fixed_data",
    "expected_donb_pmf",
    "full_factorial_design",
    "geometric_checkpoints",
    "preset",
    "run_episode",
    "run_experiment",
    "run_paired_comparison",
    "write_results",
    "__version__",
]
