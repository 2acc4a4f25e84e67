"""Result serialization: plot-ready CSV and a JSON mirror.

Floats are written with 17 significant digits so parsing the files back
reproduces every value bit for bit; row order is fixed by (experiment,
run, checkpoint), so equal results always serialize to equal bytes.
"""

from __future__ import annotations

import csv
import json
import os
from typing import Iterable, Union

from .runner import ComparisonResult, ExperimentResult

AGGREGATE_HEADER = ("experiment_id", "policy", "env", "param_json",
                    "t", "mean", "ci_low", "ci_high", "n_runs")
TRACE_HEADER = ("experiment_id", "run", "t", "cum_regret", "cum_reward")

Result = Union[ExperimentResult, ComparisonResult]


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def aggregate_rows(result: Result) -> list[tuple]:
    if isinstance(result, ComparisonResult):
        curve = result.difference
        ident = result.experiment_id
        policy = result.policy_label
        env = result.result_a.config.env.label
        params = result.param_json
    else:
        curve = result.regret
        ident = result.experiment_id
        policy = result.config.policy.label
        env = result.config.env.label
        params = result.config.param_json
    return [
        (ident, policy, env, params, t, _fmt(mean), _fmt(lo), _fmt(hi), n)
        for t, mean, lo, hi, n in curve.checkpoints
    ]


def trace_rows(result: Result) -> list[tuple]:
    if isinstance(result, ComparisonResult):
        return trace_rows(result.result_a) + trace_rows(result.result_b)
    ident = result.experiment_id
    rows = []
    for trace in result.traces:
        for t, cum_regret, cum_reward in trace.checkpoints:
            rows.append((ident, trace.run_index, t, _fmt(cum_regret), _fmt(cum_reward)))
    return rows


def _write_csv(path: str, header: tuple, rows: list[tuple]) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


# Fields holding text; everything else is numeric and must stay unquoted
# (floats arrive pre-formatted to 17 significant digits).
_STRING_FIELDS = frozenset({"experiment_id", "policy", "env", "param_json"})


def _json_object(header: tuple, row: tuple) -> str:
    parts = []
    for key, value in zip(header, row):
        rendered = json.dumps(value) if key in _STRING_FIELDS else str(value)
        parts.append(f"{json.dumps(key)}: {rendered}")
    return "{" + ", ".join(parts) + "}"


def write_results(results: Union[Result, Iterable[Result]], fmt: str, path: str) -> list[str]:
    """Write results under directory ``path``; returns the file paths.

    ``csv`` produces aggregates.csv and traces.csv; ``json`` produces
    results.json mirroring the same fields.
    """
    if isinstance(results, (ExperimentResult, ComparisonResult)):
        results = [results]
    results = list(results)
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown output format {fmt!r}; expected 'csv' or 'json'")
    agg = []
    traces = []
    for result in results:
        agg.extend(aggregate_rows(result))
        traces.extend(trace_rows(result))
    try:
        os.makedirs(path, exist_ok=True)
        if fmt == "csv":
            agg_path = os.path.join(path, "aggregates.csv")
            trace_path = os.path.join(path, "traces.csv")
            _write_csv(agg_path, AGGREGATE_HEADER, agg)
            _write_csv(trace_path, TRACE_HEADER, traces)
            return [agg_path, trace_path]
        out_path = os.path.join(path, "results.json")
        with open(out_path, "w") as handle:
            handle.write('{\n"aggregates": [\n')
            handle.write(",\n".join(_json_object(AGGREGATE_HEADER, r) for r in agg))
            handle.write('\n],\n"traces": [\n')
            handle.write(",\n".join(_json_object(TRACE_HEADER, r) for r in traces))
            handle.write("\n]\n}\n")
        return [out_path]
    except OSError as exc:
        raise OSError(f"cannot write results under {path!r}: {exc}") from exc
