"""Command-line interface.

Subcommands: ``run`` (one experiment or a named preset), ``compare``
(paired policy comparison on a shared environment), ``oracle`` (exact
bootstrap distribution tables), ``presets`` (list the named bundles).
Exit codes: 0 success, 2 configuration error, 3 runtime or numeric
error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .oracle import EstimatorMode, beta_reference_density, expected_donb_pmf
from .results import write_results
from .runner import (
    DEFAULT_MASTER_SEED,
    PRESET_NAMES,
    ConfigurationError,
    EnvSpec,
    ExperimentConfig,
    PolicySpec,
    REPLICATE_POLICY_KINDS,
    config_to_dict,
    preset,
    run_experiment,
    run_paired_comparison,
)

_PRESET_SUMMARY = (
    ("fig2-bernoulli", "bootstrap TS (J replicates) vs Beta TS regret on the "
                       "K-armed Bernoulli problem; params: --K --eps --J"),
    ("fig3-jsweep", "bootstrap TS regret across J in {10,100,1000,10000} plus "
                    "the sufficient-statistic variant; params: --K --eps"),
    ("fig4-factorial", "paired reward difference, linear bootstrap TS vs Bayes "
                       "linear TS on the factorial problem; params: --gamma --J"),
)


def _parse_checkpoints(text):
    if text is None:
        return None
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise ConfigurationError(f"bad checkpoint list {text!r}: {exc}") from exc


def _load_config_file(path):
    try:
        with open(path) as handle:
            return json.load(handle)
    except OSError as exc:
        raise OSError(f"cannot read config file {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config file {path!r} is not valid JSON: {exc}") from exc


def _pick(flag_value, file_value, default):
    if flag_value is not None:
        return flag_value
    if file_value is not None:
        return file_value
    return default


def _resolve_config(args) -> ExperimentConfig:
    """Merge defaults, config file, and flags (flags win)."""
    file_data = _load_config_file(args.config) if args.config else {}
    file_policy = file_data.get("policy", {})
    file_env = file_data.get("environment", {})
    policy_kind = _pick(args.policy, file_policy.get("kind"), None)
    env_kind = _pick(args.env, file_env.get("kind"), None)
    if policy_kind is None or env_kind is None:
        raise ConfigurationError("--policy and --env are required without a preset or config file")
    policy_kwargs = {k: v for k, v in file_policy.items() if k != "kind"}
    if policy_kind in REPLICATE_POLICY_KINDS:
        policy_kwargs["n_replicates"] = _pick(args.J, policy_kwargs.get("n_replicates"), 1000)
    elif args.J is not None:
        raise ConfigurationError(f"policy {policy_kind!r} does not take --J")
    env_kwargs = {k: v for k, v in file_env.items() if k != "kind"}
    if env_kind == "bernoulli":
        env_kwargs["n_arms"] = _pick(args.K, env_kwargs.get("n_arms"), 10)
        env_kwargs["epsilon"] = _pick(args.eps, env_kwargs.get("epsilon"), 0.1)
        env_kwargs.pop("gamma", None)
    else:
        env_kwargs["gamma"] = _pick(args.gamma, env_kwargs.get("gamma"), 1.0)
        for key in ("n_arms", "epsilon", "optimal"):
            env_kwargs.pop(key, None)
    try:
        policy_spec = PolicySpec(kind=policy_kind, **policy_kwargs)
        env_spec = EnvSpec(kind=env_kind, **env_kwargs)
    except TypeError as exc:
        raise ConfigurationError(f"bad policy/environment fields: {exc}") from exc
    horizon = _pick(args.T, file_data.get("horizon"), None)
    runs = _pick(args.runs, file_data.get("runs"), None)
    if horizon is None or runs is None:
        raise ConfigurationError("--T and --runs are required without a preset or config file")
    checkpoints = _pick(_parse_checkpoints(args.checkpoints),
                        file_data.get("checkpoints"), None)
    return ExperimentConfig(
        policy=policy_spec,
        env=env_spec,
        horizon=int(horizon),
        runs=int(runs),
        master_seed=int(_pick(args.seed, file_data.get("master_seed"), DEFAULT_MASTER_SEED)),
        checkpoints=None if checkpoints is None else tuple(checkpoints),
    )


def _echo_config(configs, path) -> None:
    payload = [config_to_dict(c) for c in configs]
    try:
        os.makedirs(path, exist_ok=True)
        with open(os.path.join(path, "config.json"), "w") as handle:
            json.dump(payload[0] if len(payload) == 1 else payload, handle,
                      indent=2, sort_keys=True)
            handle.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write config echo under {path!r}: {exc}") from exc


def _cmd_run(args) -> int:
    if args.preset is not None:
        kwargs = {"master_seed": args.seed if args.seed is not None else DEFAULT_MASTER_SEED}
        if args.K is not None:
            kwargs["K"] = args.K
        if args.eps is not None:
            kwargs["epsilon"] = args.eps
        if args.J is not None:
            kwargs["J"] = args.J
        if args.gamma is not None:
            kwargs["gamma"] = args.gamma
        bundle = preset(args.preset, args.scale, **kwargs)
        configs = bundle.configs
        if bundle.paired:
            results = [run_paired_comparison(configs[0], configs[1], workers=args.workers)]
        else:
            results = [run_experiment(c, workers=args.workers) for c in configs]
    else:
        config = _resolve_config(args)
        configs = (config,)
        results = [run_experiment(config, workers=args.workers)]
    files = write_results(results, args.format, args.out)
    _echo_config(configs, args.out)
    for result in results:
        curve = result.difference if hasattr(result, "difference") else result.regret
        final_t = curve.t[-1] if curve.t else None
        final_mean = curve.mean[-1] if curve.mean else float("nan")
        print(f"{result.experiment_id}: mean {final_mean:.6g} at t={final_t} "
              f"({curve.n_runs} runs)")
    for name in files:
        print(f"wrote {name}")
    return 0


def _cmd_compare(args) -> int:
    def policy_spec(kind):
        if kind in REPLICATE_POLICY_KINDS:
            return PolicySpec(kind, n_replicates=args.J if args.J is not None else 1000)
        return PolicySpec(kind)

    env_kind = args.env if args.env is not None else "factorial"
    if env_kind == "bernoulli":
        env = EnvSpec("bernoulli",
                      n_arms=args.K if args.K is not None else 10,
                      epsilon=args.eps if args.eps is not None else 0.1)
    else:
        env = EnvSpec("factorial", gamma=args.gamma if args.gamma is not None else 1.0)
    shared = dict(
        env=env,
        horizon=args.T if args.T is not None else 10 ** 4,
        runs=args.runs if args.runs is not None else 100,
        master_seed=args.seed if args.seed is not None else DEFAULT_MASTER_SEED,
        checkpoints=_parse_checkpoints(args.checkpoints),
    )
    config_a = ExperimentConfig(policy=policy_spec(args.policy_a), **shared)
    config_b = ExperimentConfig(policy=policy_spec(args.policy_b), **shared)
    result = run_paired_comparison(config_a, config_b, workers=args.workers)
    files = write_results(result, args.format, args.out)
    _echo_config([config_a, config_b], args.out)
    curve = result.difference
    print(f"{result.experiment_id}: mean difference {curve.mean[-1]:.6g} "
          f"[{curve.ci_low[-1]:.6g}, {curve.ci_high[-1]:.6g}] at t={curve.t[-1]}")
    for name in files:
        print(f"wrote {name}")
    return 0


def _cmd_oracle(args) -> int:
    if args.mode == "pure-mean":
        mode = EstimatorMode.pure_mean()
    else:
        mode = EstimatorMode.prior_regularized(args.prior_alpha, args.prior_beta)
    pmf = expected_donb_pmf(args.n, args.theta, mode)
    grid = np.arange(1, 400) / 400.0
    density = beta_reference_density(args.theta, args.n, grid)
    try:
        os.makedirs(args.out, exist_ok=True)
        pmf_path = os.path.join(args.out, "pmf.csv")
        ref_path = os.path.join(args.out, "beta_reference.csv")
        with open(pmf_path, "w") as handle:
            handle.write("value,prob\n")
            for value, prob in zip(pmf.support, pmf.probs):
                handle.write(f"{value:.17g},{prob:.17g}\n")
        with open(ref_path, "w") as handle:
            handle.write("grid,density\n")
            for x, d in zip(grid, density):
                handle.write(f"{x:.17g},{d:.17g}\n")
    except OSError as exc:
        raise OSError(f"cannot write oracle tables under {args.out!r}: {exc}") from exc
    print(f"wrote {pmf_path} ({pmf.support.size} support points)")
    print(f"wrote {ref_path}")
    return 0


def _cmd_presets(_args) -> int:
    for name, description in _PRESET_SUMMARY:
        print(f"{name}: {description}")
    print("scales: paper (full replication), desk (reduced horizon/runs)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="banditlab",
        description="Bandit policy simulations with bootstrap Thompson sampling.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one experiment or a named preset")
    run_p.add_argument("--preset", choices=PRESET_NAMES)
    run_p.add_argument("--scale", choices=("paper", "desk"), default="desk")
    run_p.add_argument("--policy", choices=("beta-ts", "bts", "bts-inf",
                                            "linear-bts", "bayes-linear"))
    run_p.add_argument("--env", choices=("bernoulli", "factorial"))
    run_p.add_argument("--K", type=int)
    run_p.add_argument("--eps", type=float)
    run_p.add_argument("--gamma", type=float)
    run_p.add_argument("--J", type=int)
    run_p.add_argument("--T", type=int)
    run_p.add_argument("--runs", type=int)
    run_p.add_argument("--seed", type=int)
    run_p.add_argument("--checkpoints", help="comma-separated step indices")
    run_p.add_argument("--config", help="JSON config file; flags override its values")
    run_p.add_argument("--out", required=True)
    run_p.add_argument("--format", choices=("csv", "json"), default="csv")
    run_p.add_argument("--workers", type=int, default=1)
    run_p.set_defaults(func=_cmd_run)

    cmp_p = sub.add_parser("compare", help="paired comparison of two policies")
    cmp_p.add_argument("--policy-a", required=True,
                       choices=("beta-ts", "bts", "bts-inf", "linear-bts", "bayes-linear"))
    cmp_p.add_argument("--policy-b", required=True,
                       choices=("beta-ts", "bts", "bts-inf", "linear-bts", "bayes-linear"))
    cmp_p.add_argument("--env", choices=("bernoulli", "factorial"))
    cmp_p.add_argument("--K", type=int)
    cmp_p.add_argument("--eps", type=float)
    cmp_p.add_argument("--gamma", type=float)
    cmp_p.add_argument("--J", type=int)
    cmp_p.add_argument("--T", type=int)
    cmp_p.add_argument("--runs", type=int)
    cmp_p.add_argument("--seed", type=int)
    cmp_p.add_argument("--checkpoints")
    cmp_p.add_argument("--out", required=True)
    cmp_p.add_argument("--format", choices=("csv", "json"), default="csv")
    cmp_p.add_argument("--workers", type=int, default=1)
    cmp_p.set_defaults(func=_cmd_compare)

    orc_p = sub.add_parser("oracle", help="exact bootstrap distribution tables")
    orc_p.add_argument("--n", type=int, required=True)
    orc_p.add_argument("--theta", type=float, required=True)
    orc_p.add_argument("--mode", choices=("pure-mean", "prior-regularized"),
                       default="pure-mean")
    orc_p.add_argument("--prior-alpha", type=float, default=1.0)
    orc_p.add_argument("--prior-beta", type=float, default=1.0)
    orc_p.add_argument("--out", required=True)
    orc_p.set_defaults(func=_cmd_oracle)

    lst_p = sub.add_parser("presets", help="list named presets")
    lst_p.set_defaults(func=_cmd_presets)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
