"""Runs (policy, seed) grids and writes their results."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .config import ExperimentConfig
from .policy import PolicyKind
from .simcost import RunMetrics, format_log, run_simulation
from .workload import generate_trace, read_trace

METRIC_FIELDS = (
    "system_cost", "switching_cost", "total_accuracy_cost", "edge_inference_latency_cost",
    "edge_offloading_latency_cost", "cloud_cost", "average_accuracy_cost",
    "edge_execution_ratio", "request_count", "edge_executions", "cloud_executions",
    "model_loads",
)

# (label, metric) in report row order.
SUMMARY_ROWS = (
    ("System cost", "system_cost"),
    ("Switching cost", "switching_cost"),
    ("Total accuracy cost", "total_accuracy_cost"),
    ("Average accuracy cost", "average_accuracy_cost"),
    ("Inference latency", "edge_inference_latency_cost"),
    ("Offloading latency", "edge_offloading_latency_cost"),
    ("Cloud cost", "cloud_cost"),
    ("Edge Execution Ratio", "edge_execution_ratio"),
)


@dataclass
class RunResult:
    policy: PolicyKind
    seed: int
    metrics: RunMetrics
    log: Optional[str] = None


def trace_for(cfg: ExperimentConfig, seed: int):
    if cfg.trace_path is not None:
        return read_trace(cfg.trace_path, cfg.catalog)
    return generate_trace(cfg.workload_for(seed), cfg.catalog)


def _run_one(cfg: ExperimentConfig, trace, policy: PolicyKind, seed: int, log: bool) -> RunResult:
    records = [] if log else None
    metrics = run_simulation(cfg.catalog, trace, cfg.server, cfg.aoc, cfg.weights, policy,
                             cfg.options, seed=seed, records=records)
    return RunResult(policy, seed, metrics, format_log(records) if log else None)


def _run_seed(cfg: ExperimentConfig, seed: int, policies: Sequence[PolicyKind], log: bool):
    trace = trace_for(cfg, seed)
    return [_run_one(cfg, trace, p, seed, log) for p in policies]


def worker_count() -> int:
    raw = os.environ.get("EDGESERVE_SIM_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    return n if n > 0 else (os.cpu_count() or 1)


def run_grid(cfg: ExperimentConfig, policies: Optional[Sequence[PolicyKind]] = None,
             log: bool = False, workers: Optional[int] = None) -> list[RunResult]:
    """Every policy over every seed; results ordered by (policy, seed)."""
    policies = list(policies or cfg.policies)
    workers = workers or worker_count()
    if workers > 1 and len(cfg.seeds) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(cfg.seeds))) as pool:
            futures = [pool.submit(_run_seed, cfg, s, policies, log) for s in cfg.seeds]
            per_seed = [f.result() for f in futures]
    else:
        per_seed = [_run_seed(cfg, s, policies, log) for s in cfg.seeds]
    by_policy = {p: [] for p in policies}
    for results in per_seed:
        for r in results:
            by_policy[r.policy].append(r)
    return [r for p in policies for r in by_policy[p]]


def mean_metrics(results: Sequence[RunResult]) -> dict:
    rows = [r.metrics.to_dict() for r in results]
    return {k: sum(row[k] for row in rows) / len(rows) for k in METRIC_FIELDS}


def metrics_document(policy: PolicyKind, results: Sequence[RunResult]) -> dict:
    return {
        "policy": policy.value,
        "seeds": [r.seed for r in results],
        "per_seed": [dict(seed=r.seed, **r.metrics.to_dict()) for r in results],
        "mean": mean_metrics(results),
    }


def summarize(results: Sequence[RunResult]) -> dict[PolicyKind, dict]:
    grouped: dict[PolicyKind, list] = {}
    for r in results:
        grouped.setdefault(r.policy, []).append(r)
    return {p: mean_metrics(rs) for p, rs in grouped.items()}


def ranking(summary: dict[PolicyKind, dict]) -> list[PolicyKind]:
    return sorted(summary, key=lambda p: (summary[p]["system_cost"], p.value))


def comparison_csv(results: Sequence[RunResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("policy", "seed") + METRIC_FIELDS)
    for r in results:
        d = r.metrics.to_dict()
        w.writerow([r.policy.value, r.seed] + [repr(d[k]) for k in METRIC_FIELDS])
    return buf.getvalue()


def summary_csv(summary: dict[PolicyKind, dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    policies = list(summary)
    w.writerow(["metric"] + [p.value for p in policies])
    for label, key in SUMMARY_ROWS:
        w.writerow([label] + [repr(summary[p][key]) for p in policies])
    return buf.getvalue()


def summary_table(summary: dict[PolicyKind, dict]) -> str:
    policies = list(summary)
    width = max(len(label) for label, _ in SUMMARY_ROWS)
    lines = [" " * width + "".join(f"{p.value:>14}" for p in policies)]
    for label, key in SUMMARY_ROWS:
        if key == "edge_execution_ratio":
            cells = "".join(f"{summary[p][key]:>14.1%}" for p in policies)
        elif key == "average_accuracy_cost":
            cells = "".join(f"{summary[p][key]:>14.4f}" for p in policies)
        else:
            cells = "".join(f"{summary[p][key]:>14.2f}" for p in policies)
        lines.append(f"{label:<{width}}{cells}")
    return "\n".join(lines)


def write_atomic(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def dump_json(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"
