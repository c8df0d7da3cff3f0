"""Acceptance gate: one PASS/FAIL line per criterion.

Run ``pytest tests/test_acceptance.py -v`` (lines are printed uncaptured),
or ``python tests/test_acceptance.py`` for the report alone.
"""

import math
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from edgeserve_sim import policy as policy_mod
from edgeserve_sim.catalog import (ModelProfile, TaskProfile, accuracy_at, builtin_catalog,
                                   calibrate_accuracy)
from edgeserve_sim.config import default_config
from edgeserve_sim.context import AoCConfig
from edgeserve_sim.edgecache import EdgeServerConfig
from edgeserve_sim.experiment import run_grid, summarize
from edgeserve_sim.policy import PolicyKind
from edgeserve_sim.simcost import CostWeights, SimOptions, run_simulation
from edgeserve_sim.workload import WorkloadConfig, generate_trace

HERE = Path(__file__).resolve().parent
sys.path.insert(0, str(HERE))
import oracles  # noqa: E402

CALIBRATABLE = [
    ("gpt3-13b", "translation"), ("gpt3-13b", "superglue"),
    ("gpt3-175b", "translation"), ("gpt3-175b", "superglue"),
    ("gpt3-175b", "basic-arithmetic"),
]


def report(capsys, number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} | {detail}"
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)
    return ok


@pytest.fixture(scope="module")
def default_summary():
    cfg = default_config()
    t0 = time.perf_counter()
    summary = summarize(run_grid(cfg))
    return cfg, summary, time.perf_counter() - t0


def check_calibration():
    t0 = time.perf_counter()
    models = {m.id: m for m in builtin_catalog()}
    worst = 0.0
    for mid, tid in CALIBRATABLE:
        task = models[mid].task(tid)
        acc = calibrate_accuracy(task, models[mid].window_for(tid))
        for k, score in ((0, task.zero_shot_score), (1, task.one_shot_score),
                         (task.few_shot_k, task.few_shot_score)):
            worst = max(worst, abs(accuracy_at(acc, k) - score))
    elapsed = time.perf_counter() - t0
    return worst <= 1e-6 and elapsed < 1.0, f"max error {worst:.2e}, {elapsed:.3f} s"


def test_1_calibration_fidelity(capsys):
    ok, detail = check_calibration()
    assert report(capsys, 1, "calibration reproduces zero/one/few-shot scores", ok, detail)


def check_ordering(summary, elapsed, n_seeds):
    cost = {p: summary[p]["system_cost"] for p in summary}
    lc, lfu, cloud = cost[PolicyKind.LC], cost[PolicyKind.LFU], cost[PolicyKind.CLOUD_ONLY]
    worst_baseline = min(cost[PolicyKind.RANDOM], cost[PolicyKind.FIFO])
    ok = lc < lfu < cloud and max(lc, lfu) < worst_baseline and n_seeds >= 10 and elapsed < 60
    detail = " ".join(f"{p.value}={cost[p]:.2f}" for p in summary)
    return ok, f"{detail}; {n_seeds} seeds, {elapsed:.1f} s"


def test_2_policy_ordering(capsys, default_summary):
    cfg, summary, elapsed = default_summary
    ok, detail = check_ordering(summary, elapsed, len(cfg.seeds))
    assert report(capsys, 2, "LC < LFU < Cloud, LC and LFU beat Random and FIFO", ok, detail)


def check_accuracy_advantage(summary):
    lc = summary[PolicyKind.LC]["average_accuracy_cost"]
    lfu = summary[PolicyKind.LFU]["average_accuracy_cost"]
    return lc < lfu, f"lc={lc:.5f} lfu={lfu:.5f}"


def test_3_accuracy_cost_advantage(capsys, default_summary):
    ok, detail = check_accuracy_advantage(default_summary[1])
    assert report(capsys, 3, "LC average accuracy cost below LFU", ok, detail)


def check_cloud_identities(n_traces=40):
    catalog = builtin_catalog()
    ids = [m.id for m in catalog]
    rng = np.random.default_rng(2024)
    bad = 0
    for i in range(n_traces):
        wl = WorkloadConfig(int(rng.integers(2**32)), float(rng.uniform(1, 300)),
                            float(rng.uniform(0.1, 5)), tuple(ids), float(rng.uniform(0, 2)))
        server = EdgeServerConfig(int(rng.uniform(1e9, 4e11)), 10e9, 2000.0)
        m = run_simulation(catalog, generate_trace(wl, catalog), server, AoCConfig(),
                           CostWeights(), "cloud", seed=i)
        c = m.costs
        if (c.switching_cost, c.edge_inference_latency_cost, c.total_accuracy_cost,
                m.edge_execution_ratio) != (0, 0, 0, 0):
            bad += 1
    return bad == 0, f"{n_traces} traces, {bad} violations"


def test_4_cloud_only_identities(capsys):
    ok, detail = check_cloud_identities()
    assert report(capsys, 4, "cloud-only switching/inference/accuracy/ratio all zero", ok, detail)


def _small_instance(rng):
    n = int(rng.integers(2, 9))
    catalog = [ModelProfile(f"m{i}", float(rng.integers(1, 40)), float(rng.uniform(0.1, 5)),
                            (TaskProfile("t", float(rng.uniform(10, 90))),), bytes_per_param=1)
               for i in range(n)]
    total = sum(int(m.params_millions) for m in catalog) * 1_000_000
    biggest = max(int(m.params_millions) for m in catalog) * 1_000_000
    capacity = int(rng.integers(biggest, max(biggest, total // 2) + 1))
    server = EdgeServerConfig(capacity, float(rng.uniform(1e7, 1e9)), 100.0)
    kind = ["exponential", "linear", "step"][int(rng.integers(3))]
    aoc = AoCConfig(kind, float(rng.uniform(0.01, 0.5)) if kind == "exponential"
                    else float(rng.uniform(1, 60)))
    wl = WorkloadConfig(int(rng.integers(2**32)), float(rng.uniform(5, 100)), 2.0,
                        tuple(m.id for m in catalog), float(rng.uniform(0, 1.5)))
    trace = generate_trace(wl, catalog)[:200]
    return catalog, server, aoc, trace


def check_oracle_equivalence(n_instances=1000, seed=7):
    rng = np.random.default_rng(seed)
    real = policy_mod.select_victims
    stats = {"calls": 0, "mismatches": 0}

    def checked(kind, state, store, needed, now, rng_=None):
        got = real(kind, state, store, needed, now, rng_)
        kind = PolicyKind(kind)
        if kind is PolicyKind.FIFO:
            want = oracles.fifo_victims(state.entries, needed)
        elif kind is PolicyKind.LFU:
            want = oracles.lfu_victims(state.entries, needed)
        elif kind is PolicyKind.LC:
            want = oracles.lc_victims(state.entries, store.examples, store.cfg, now, needed)
        else:
            return got
        stats["calls"] += 1
        stats["mismatches"] += got != want
        return got

    t0 = time.perf_counter()
    policy_mod.select_victims = checked
    try:
        for i in range(n_instances):
            catalog, server, aoc, trace = _small_instance(rng)
            kind = ("fifo", "lfu", "lc")[i % 3]
            run_simulation(catalog, trace, server, aoc, CostWeights(), kind,
                           SimOptions(admission=bool(i % 2)), seed=i)
    finally:
        policy_mod.select_victims = real
    elapsed = time.perf_counter() - t0
    ok = stats["mismatches"] == 0 and stats["calls"] >= n_instances and elapsed < 30
    return ok, (f"{n_instances} instances, {stats['calls']} selections, "
                f"{stats['mismatches']} mismatches, {elapsed:.1f} s")


def test_5_oracle_equivalence(capsys):
    ok, detail = check_oracle_equivalence()
    assert report(capsys, 5, "FIFO/LFU/LC victims match brute-force oracles", ok, detail)


INVARIANT_SUITES = [
    "test_edgecache.py",  # capacity safety
    "test_simcost.py",  # additivity, conservation
    "test_context.py",  # utility properties
    "test_catalog.py",  # accuracy monotonicity, window clamp
    "test_workload.py",  # determinism, round-trips
]


def check_invariant_suites():
    t0 = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", "--hypothesis-seed=0",
         *[str(HERE / s) for s in INVARIANT_SUITES]],
        capture_output=True, text=True, cwd=HERE.parent)
    elapsed = time.perf_counter() - t0
    tail = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr[-200:]
    return proc.returncode == 0 and elapsed < 30, f"{tail}; {elapsed:.1f} s"


def test_6_invariant_suites(capsys):
    ok, detail = check_invariant_suites()
    assert report(capsys, 6, "property suites hold with fixed seeds", ok, detail)


def check_workload_statistics():
    catalog = builtin_catalog()
    trace = generate_trace(WorkloadConfig(11, 1000.0, 10.0, ("gpt3-13b",)), catalog)
    n = len(trace)
    poisson_ok = abs(n - 10_000) <= 3 * math.sqrt(10_000)
    trace = generate_trace(WorkloadConfig(12, 10_000.0, 10.0, ("gpt3-13b", "gpt3-175b"), 1.0),
                           catalog)[:100_000]
    first = sum(r.model_id == "gpt3-13b" for r in trace)
    ratio = first / (len(trace) - first)
    zipf_ok = len(trace) == 100_000 and abs(ratio - 2.0) <= 0.05
    return poisson_ok and zipf_ok, f"count {n} (10000 +- 300), zipf ratio {ratio:.4f} over {len(trace)}"


def test_7_workload_statistics(capsys):
    ok, detail = check_workload_statistics()
    assert report(capsys, 7, "Poisson count within 3 sigma, Zipf(1) ratio 2.0 +- 0.05", ok, detail)


def main() -> int:
    cfg = default_config()
    t0 = time.perf_counter()
    summary = summarize(run_grid(cfg))
    elapsed = time.perf_counter() - t0
    results = [
        report(None, 1, "calibration", *check_calibration()),
        report(None, 2, "policy ordering", *check_ordering(summary, elapsed, len(cfg.seeds))),
        report(None, 3, "accuracy-cost advantage", *check_accuracy_advantage(summary)),
        report(None, 4, "cloud-only identities", *check_cloud_identities()),
        report(None, 5, "oracle equivalence", *check_oracle_equivalence()),
        report(None, 6, "invariant suites", *check_invariant_suites()),
        report(None, 7, "workload statistics", *check_workload_statistics()),
    ]
    return 0 if all(results) else 1


if __name__ == "__main__":
    sys.exit(main())
