"""Episode loop, replication, presets, and paired comparisons.

Every episode derives its three random streams (environment, policy,
replicate weights) from (master_seed, run_index, role), so results are
identical whether runs execute serially or across a worker pool, and
paired comparisons automatically share environment randomness run by
run.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .bernoulli import BetaTsPolicy, BtsInfPolicy, BtsPolicy
from .core import RngStreamKey, StepRecord, derive_stream
from .envs import BernoulliEnv, FactorialEnv
from .linear import BayesLinearTsPolicy, LinearBtsPolicy

DEFAULT_MASTER_SEED = 20260819

BERNOULLI_POLICY_KINDS = ("beta-ts", "bts", "bts-inf")
LINEAR_POLICY_KINDS = ("linear-bts", "bayes-linear")
POLICY_KINDS = BERNOULLI_POLICY_KINDS + LINEAR_POLICY_KINDS
REPLICATE_POLICY_KINDS = ("bts", "linear-bts")

# Cap for per-step trace recording; full traces are a debugging aid, not
# a unit of production output, and must never make memory O(T) at scale.
MAX_RECORDED_STEPS = 100_000


class ConfigurationError(ValueError):
    """Invalid experiment configuration (maps to CLI exit code 2)."""


@dataclass(frozen=True)
class PolicySpec:
    kind: str
    n_replicates: Optional[int] = None
    prior_alpha: float = 1.0
    prior_beta: float = 1.0
    ridge: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in POLICY_KINDS:
            raise ConfigurationError(
                f"unknown policy kind {self.kind!r}; expected one of {POLICY_KINDS}"
            )
        if self.kind in REPLICATE_POLICY_KINDS:
            if self.n_replicates is None or self.n_replicates < 1:
                raise ConfigurationError(f"policy {self.kind!r} needs a positive replicate count")
        elif self.n_replicates is not None:
            raise ConfigurationError(f"policy {self.kind!r} does not take a replicate count")
        if self.prior_alpha <= 0 or self.prior_beta <= 0:
            raise ConfigurationError("prior pseudo-counts must be positive")
        if self.ridge <= 0:
            raise ConfigurationError("ridge penalty must be positive")

    @property
    def label(self) -> str:
        if self.kind in REPLICATE_POLICY_KINDS:
            return f"{self.kind}-J{self.n_replicates}"
        return self.kind


@dataclass(frozen=True)
class EnvSpec:
    kind: str
    n_arms: int = 10
    epsilon: float = 0.1
    optimal: int = 0
    gamma: float = 0.0

    def __post_init__(self) -> None:
        if self.kind == "bernoulli":
            if self.n_arms < 2:
                raise ConfigurationError("bernoulli environment needs at least 2 arms")
            if not 0.0 < self.epsilon < 0.5:
                raise ConfigurationError("epsilon must lie in (0, 0.5)")
            if not 0 <= self.optimal < self.n_arms:
                raise ConfigurationError("optimal arm index out of range")
        elif self.kind == "factorial":
            if self.gamma < 0:
                raise ConfigurationError("gamma must be non-negative")
        else:
            raise ConfigurationError(
                f"unknown environment kind {self.kind!r}; expected 'bernoulli' or 'factorial'"
            )

    @property
    def label(self) -> str:
        if self.kind == "bernoulli":
            return f"bernoulli-K{self.n_arms}-eps{self.epsilon}"
        return f"factorial-g{self.gamma}"


def geometric_checkpoints(horizon: int) -> tuple[int, ...]:
    """Checkpoint grid {1, 2, 5} x 10^k capped at the horizon."""
    if horizon < 1:
        raise ConfigurationError("horizon must be at least 1")
    points = []
    base = 1
    while base <= horizon:
        for mult in (1, 2, 5):
            value = mult * base
            if value <= horizon:
                points.append(value)
        base *= 10
    if points[-1] != horizon:
        points.append(horizon)
    return tuple(points)


@dataclass(frozen=True)
class ExperimentConfig:
    policy: PolicySpec
    env: EnvSpec
    horizon: int
    runs: int
    master_seed: int = DEFAULT_MASTER_SEED
    checkpoints: Optional[tuple[int, ...]] = None

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ConfigurationError("horizon must be at least 1")
        if self.runs < 1:
            raise ConfigurationError("runs must be at least 1")
        if not 0 <= self.master_seed < 2 ** 64:
            raise ConfigurationError("master_seed must fit in 64 bits")
        cps = self.checkpoints
        if cps is None:
            cps = geometric_checkpoints(self.horizon)
        cps = tuple(int(t) for t in cps)
        if any(b <= a for a, b in zip(cps, cps[1:])):
            raise ConfigurationError("checkpoints must be strictly increasing")
        if cps and (cps[0] < 1 or cps[-1] > self.horizon):
            raise ConfigurationError("checkpoints must lie within [1, horizon]")
        object.__setattr__(self, "checkpoints", cps)
        linear = self.policy.kind in LINEAR_POLICY_KINDS
        if linear and self.env.kind != "factorial":
            raise ConfigurationError(
                f"policy {self.policy.kind!r} requires the factorial environment"
            )
        if not linear and self.env.kind != "bernoulli":
            raise ConfigurationError(
                f"policy {self.policy.kind!r} requires the bernoulli environment"
            )

    @property
    def experiment_id(self) -> str:
        return (
            f"{self.policy.label}__{self.env.label}"
            f"__T{self.horizon}__R{self.runs}__s{self.master_seed}"
        )

    @property
    def param_json(self) -> str:
        return json.dumps(config_to_dict(self), sort_keys=True, separators=(",", ":"))


def config_to_dict(config: ExperimentConfig) -> dict:
    return {
        "policy": asdict(config.policy),
        "environment": asdict(config.env),
        "horizon": config.horizon,
        "runs": config.runs,
        "master_seed": config.master_seed,
        "checkpoints": list(config.checkpoints),
    }


def config_from_dict(data: dict) -> ExperimentConfig:
    """Build a config from the flat dict shape used by config files."""
    if not isinstance(data, dict):
        raise ConfigurationError("config must be a mapping")
    known = {"policy", "environment", "horizon", "runs", "master_seed", "checkpoints"}
    extra = set(data) - known
    if extra:
        raise ConfigurationError(f"unknown config fields: {sorted(extra)}")
    missing = {"policy", "environment", "horizon", "runs"} - set(data)
    if missing:
        raise ConfigurationError(f"missing config fields: {sorted(missing)}")
    try:
        policy = PolicySpec(**data["policy"])
        env = EnvSpec(**data["environment"])
    except TypeError as exc:
        raise ConfigurationError(f"bad policy/environment spec: {exc}") from exc
    checkpoints = data.get("checkpoints")
    return ExperimentConfig(
        policy=policy,
        env=env,
        horizon=int(data["horizon"]),
        runs=int(data["runs"]),
        master_seed=int(data.get("master_seed", DEFAULT_MASTER_SEED)),
        checkpoints=None if checkpoints is None else tuple(checkpoints),
    )


def build_env(spec: EnvSpec):
    if spec.kind == "bernoulli":
        return BernoulliEnv(spec.n_arms, spec.epsilon, spec.optimal)
    return FactorialEnv(spec.gamma)


def build_policy(spec: PolicySpec, env, rng, weight_rng):
    if spec.kind == "beta-ts":
        return BetaTsPolicy(env.n_arms, spec.prior_alpha, spec.prior_beta, rng)
    if spec.kind == "bts":
        return BtsPolicy(env.n_arms, spec.n_replicates, spec.prior_alpha,
                         spec.prior_beta, rng, weight_rng)
    if spec.kind == "bts-inf":
        return BtsInfPolicy(env.n_arms, spec.prior_alpha, spec.prior_beta, rng)
    if spec.kind == "linear-bts":
        return LinearBtsPolicy(env.design, spec.n_replicates, spec.ridge, rng, weight_rng)
    return BayesLinearTsPolicy(env.design, rng)


@dataclass(frozen=True)
class RegretTrace:
    """Per-run cumulative regret/reward sampled at the checkpoints."""

    run_index: int
    checkpoints: tuple[tuple[int, float, float], ...]
    window_times: Optional[tuple[tuple[int, float], ...]] = None
    steps: Optional[tuple[StepRecord, ...]] = None


def run_episode(config: ExperimentConfig, run_index: int, *,
                record_steps: bool = False,
                timing_window: Optional[int] = None) -> RegretTrace:
    """Play one full episode and return its checkpointed trace.

    ``timing_window`` > 0 additionally records wall time per window of
    that many steps; ``record_steps`` keeps every StepRecord (small
    horizons only).
    """
    if record_steps and config.horizon > MAX_RECORDED_STEPS:
        raise ConfigurationError(
            f"per-step recording is limited to horizons <= {MAX_RECORDED_STEPS}"
        )
    env = build_env(config.env)
    env_rng = derive_stream(RngStreamKey(config.master_seed, run_index, "environment"))
    policy_rng = derive_stream(RngStreamKey(config.master_seed, run_index, "policy"))
    weight_rng = derive_stream(RngStreamKey(config.master_seed, run_index, "replicate-weights"))
    policy = build_policy(config.policy, env, policy_rng, weight_rng)

    context = env.context()
    select = policy.select
    update = policy.update
    pull = env.pull
    checkpoints = config.checkpoints
    n_checkpoints = len(checkpoints)
    next_index = 0
    next_checkpoint = checkpoints[0] if checkpoints else 0
    out = []
    steps = [] if record_steps else None
    windows = [] if timing_window else None
    cum_reward = 0.0
    cum_regret = 0.0
    window_start = time.perf_counter() if timing_window else 0.0
    for t in range(1, config.horizon + 1):
        arm = select(context)
        reward, counterfactual = pull(arm, env_rng)
        update(arm, reward)
        cum_reward += reward
        cum_regret += counterfactual - reward
        if record_steps:
            steps.append(StepRecord(t, arm, reward, counterfactual))
        if t == next_checkpoint:
            out.append((t, cum_regret, cum_reward))
            next_index += 1
            next_checkpoint = checkpoints[next_index] if next_index < n_checkpoints else 0
        if timing_window and t % timing_window == 0:
            now = time.perf_counter()
            windows.append((t, now - window_start))
            window_start = now
    return RegretTrace(
        run_index=run_index,
        checkpoints=tuple(out),
        window_times=None if windows is None else tuple(windows),
        steps=None if steps is None else tuple(steps),
    )


@dataclass(frozen=True)
class AggregateCurve:
    """Mean and pointwise 95% normal-approximation CI across runs.

    With a single run the interval degenerates to the point estimate and
    ``degenerate`` is set instead of emitting NaNs.
    """

    t: tuple[int, ...]
    mean: tuple[float, ...]
    ci_low: tuple[float, ...]
    ci_high: tuple[float, ...]
    n_runs: int
    degenerate: bool = False

    @property
    def checkpoints(self) -> list[tuple[int, float, float, float, int]]:
        return [
            (t, m, lo, hi, self.n_runs)
            for t, m, lo, hi in zip(self.t, self.mean, self.ci_low, self.ci_high)
        ]


def aggregate_curve(t_values, per_run_values: np.ndarray) -> AggregateCurve:
    values = np.asarray(per_run_values, dtype=np.float64)
    t_values = tuple(int(t) for t in t_values)
    n = values.shape[0]
    mean = values.mean(axis=0)
    if n == 1:
        point = tuple(float(m) for m in mean)
        return AggregateCurve(t_values, point, point, point, 1, degenerate=True)
    half = 1.96 * values.std(axis=0, ddof=1) / math.sqrt(n)
    return AggregateCurve(
        t_values,
        tuple(float(m) for m in mean),
        tuple(float(m - h) for m, h in zip(mean, half)),
        tuple(float(m + h) for m, h in zip(mean, half)),
        n,
    )


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    traces: tuple[RegretTrace, ...]
    regret: AggregateCurve

    @property
    def experiment_id(self) -> str:
        return self.config.experiment_id


def _episode_task(payload) -> RegretTrace:
    config, run_index = payload
    return run_episode(config, run_index)


def run_experiment(config: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """Run all replications and aggregate regret at the checkpoints.

    The reduction is ordered by run_index, so output is byte-identical
    for any worker count.
    """
    if workers < 1:
        raise ConfigurationError("workers must be at least 1")
    if workers == 1 or config.runs == 1:
        traces = [run_episode(config, i) for i in range(config.runs)]
    else:
        tasks = [(config, i) for i in range(config.runs)]
        chunk = max(1, math.ceil(config.runs / (workers * 4)))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            traces = list(pool.map(_episode_task, tasks, chunksize=chunk))
    regret = np.array([[cp[1] for cp in tr.checkpoints] for tr in traces])
    curve = aggregate_curve(config.checkpoints, regret)
    return ExperimentResult(config, tuple(traces), curve)


@dataclass(frozen=True)
class ComparisonResult:
    """Paired difference in cumulative reward (A minus B), run by run."""

    result_a: ExperimentResult
    result_b: ExperimentResult
    difference: AggregateCurve

    @property
    def experiment_id(self) -> str:
        a = self.result_a.config
        b = self.result_b.config
        return (
            f"paired__{a.policy.label}__vs__{b.policy.label}__{a.env.label}"
            f"__T{a.horizon}__R{a.runs}__s{a.master_seed}"
        )

    @property
    def policy_label(self) -> str:
        return f"{self.result_a.config.policy.label}-minus-{self.result_b.config.policy.label}"

    @property
    def param_json(self) -> str:
        a = self.result_a.config
        b = self.result_b.config
        return json.dumps(
            {
                "policy_a": asdict(a.policy),
                "policy_b": asdict(b.policy),
                "environment": asdict(a.env),
                "horizon": a.horizon,
                "runs": a.runs,
                "master_seed": a.master_seed,
                "checkpoints": list(a.checkpoints),
            },
            sort_keys=True,
            separators=(",", ":"),
        )


def run_paired_comparison(config_a: ExperimentConfig, config_b: ExperimentConfig,
                          workers: int = 1) -> ComparisonResult:
    """Run both configs against shared environment streams and difference them.

    Stream keys depend only on (master_seed, run_index, role), so equal
    seeds make the environment draw sequences identical step for step;
    the per-run reward difference isolates the policies.
    """
    shared = ("env", "horizon", "runs", "master_seed", "checkpoints")
    for name in shared:
        if getattr(config_a, name) != getattr(config_b, name):
            raise ConfigurationError(
                "paired comparison requires matching environment, horizon, runs, "
                f"master_seed, and checkpoints (mismatch in {name})"
            )
    result_a = run_experiment(config_a, workers)
    result_b = run_experiment(config_b, workers)
    reward_a = np.array([[cp[2] for cp in tr.checkpoints] for tr in result_a.traces])
    reward_b = np.array([[cp[2] for cp in tr.checkpoints] for tr in result_b.traces])
    curve = aggregate_curve(config_a.checkpoints, reward_a - reward_b)
    return ComparisonResult(result_a, result_b, curve)


@dataclass(frozen=True)
class PresetBundle:
    name: str
    scale: str
    configs: tuple[ExperimentConfig, ...]
    paired: bool


PRESET_NAMES = ("fig2-bernoulli", "fig3-jsweep", "fig4-factorial")

_SWEEP_REPLICATES = (10, 100, 1000, 10000)


def preset(name: str, scale: str = "desk", *, K: int = 10, epsilon: float = 0.1,
           J: int = 1000, gamma: float = 1.0,
           master_seed: int = DEFAULT_MASTER_SEED) -> PresetBundle:
    """Named experiment bundles reproducing the benchmark comparisons.

    fig2-bernoulli: bootstrap-vs-Beta Thompson regret on the K-armed
    Bernoulli problem. fig3-jsweep: the same problem across replicate
    counts 10..10000 plus the sufficient-statistic variant. fig4-factorial:
    paired reward comparison of linear bootstrap TS against Bayesian
    linear TS under heteroscedasticity gamma.
    """
    if name not in PRESET_NAMES:
        raise ConfigurationError(
            f"unknown preset {name!r}; valid presets: {', '.join(PRESET_NAMES)}"
        )
    if scale not in ("paper", "desk"):
        raise ConfigurationError(f"unknown scale {scale!r}; expected 'paper' or 'desk'")
    if name in ("fig2-bernoulli", "fig3-jsweep"):
        horizon = 10 ** 6 if scale == "paper" else 10 ** 5
        runs = 1000 if scale == "paper" else 200
        env = EnvSpec("bernoulli", n_arms=K, epsilon=epsilon)
        if name == "fig2-bernoulli":
            policies = [PolicySpec("bts", n_replicates=J), PolicySpec("beta-ts")]
        else:
            policies = [PolicySpec("bts", n_replicates=j) for j in _SWEEP_REPLICATES]
            policies.append(PolicySpec("bts-inf"))
        configs = tuple(
            ExperimentConfig(policy=p, env=env, horizon=horizon, runs=runs,
                             master_seed=master_seed)
            for p in policies
        )
        return PresetBundle(name, scale, configs, paired=False)
    env = EnvSpec("factorial", gamma=gamma)
    configs = (
        ExperimentConfig(policy=PolicySpec("linear-bts", n_replicates=J), env=env,
                         horizon=10 ** 4, runs=100, master_seed=master_seed),
        ExperimentConfig(policy=PolicySpec("bayes-linear"), env=env,
                         horizon=10 ** 4, runs=100, master_seed=master_seed),
    )
    return PresetBundle(name, scale, configs, paired=True)
