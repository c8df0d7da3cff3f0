"""Trace-driven simulation of one edge server and its five-part cost.

Per request the policy decides, evictions and the load happen, the request
executes at the edge or in the cloud, and one demonstration example is
recorded for its model when it completes.  There is no queueing: each
request's latency is analytic.  A request that arrives while its model is
still loading starts when the load finishes.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field, fields
from typing import Optional, Sequence

from .catalog import AccuracyModel, ModelProfile, accuracy_at, accuracy_models, catalog_index
from .context import AoCConfig, ContextStore
from .edgecache import (CacheState, EdgeServerConfig, evict_model, load_model, touch)
from .errors import ConfigError
from .policy import OffloadToCloud, PolicyKind, decide, policy_rng
from .workload import Request, validate_trace

LOG_HEADER = ("request_id", "arrival_time_s", "model_id", "task_id", "decision",
              "load_latency_s", "inference_latency_s", "k_eff", "accuracy",
              "accuracy_cost", "cloud")


@dataclass(frozen=True)
class CostWeights:
    w_switch: float = 1.0
    w_acc: float = 1.0
    w_inf: float = 1.0
    w_off: float = 1.0
    w_cloud: float = 0.5
    access_latency_s: float = 0.02
    core_latency_s: float = 0.1
    cloud_throughput_gflops: float = 10000.0

    def __post_init__(self):
        for f in fields(self):
            if not getattr(self, f.name) >= 0:
                raise ConfigError("must be >= 0", f"weights.{f.name}")


@dataclass(frozen=True)
class SimOptions:
    offload_on_miss: bool = False
    admission: bool = False
    context_overhead_gamma: float = 0.01
    log: bool = False
    check_invariants: bool = False


@dataclass
class CostBreakdown:
    switching_cost: float = 0.0
    total_accuracy_cost: float = 0.0
    edge_inference_latency_cost: float = 0.0
    edge_offloading_latency_cost: float = 0.0
    cloud_cost: float = 0.0

    @property
    def system_cost(self) -> float:
        return (self.switching_cost + self.total_accuracy_cost
                + self.edge_inference_latency_cost + self.edge_offloading_latency_cost
                + self.cloud_cost)


@dataclass
class RunMetrics:
    costs: CostBreakdown = field(default_factory=CostBreakdown)
    request_count: int = 0
    edge_executions: int = 0
    cloud_executions: int = 0
    model_loads: int = 0

    @property
    def system_cost(self) -> float:
        return self.costs.system_cost

    @property
    def average_accuracy_cost(self) -> float:
        return self.costs.total_accuracy_cost / self.request_count if self.request_count else 0.0

    @property
    def edge_execution_ratio(self) -> float:
        return self.edge_executions / self.request_count if self.request_count else 0.0

    def to_dict(self) -> dict:
        d = {"system_cost": self.system_cost}
        d.update(asdict(self.costs))
        d.update(
            average_accuracy_cost=self.average_accuracy_cost,
            edge_execution_ratio=self.edge_execution_ratio,
            request_count=self.request_count,
            edge_executions=self.edge_executions,
            cloud_executions=self.cloud_executions,
            model_loads=self.model_loads,
        )
        return d


@dataclass(frozen=True)
class RequestRecord:
    request_id: int
    arrival_time_s: float
    model_id: str
    task_id: str
    decision: str  # edge_hit | edge_load | cloud
    load_latency_s: float
    inference_latency_s: float
    k_eff: float
    accuracy: float
    accuracy_cost: float
    switching_cost: float
    inference_cost: float
    offloading_cost: float
    cloud_cost: float
    weighted_accuracy_cost: float

    @property
    def cloud(self) -> bool:
        return self.decision == "cloud"


def inference_latency(gflops: float, k_eff: float, server: EdgeServerConfig,
                      gamma: float) -> float:
    return gflops * (1.0 + gamma * k_eff) / server.edge_throughput_gflops


def request_cost_edge(profile: ModelProfile, task_id: str, accuracy_model: AccuracyModel,
                      k_eff: float, server: EdgeServerConfig, weights: CostWeights,
                      gamma: float = 0.01) -> dict:
    """Edge-side cost components of one request on a resident model."""
    latency = inference_latency(profile.gflops_for(task_id), k_eff, server, gamma)
    accuracy = accuracy_at(accuracy_model, k_eff)
    accuracy_cost = (100.0 - accuracy) / 100.0
    return {
        "inference_latency_s": latency,
        "offload_latency_s": weights.access_latency_s,
        "accuracy": accuracy,
        "accuracy_cost": accuracy_cost,
        "inference_cost": weights.w_inf * latency,
        "offloading_cost": weights.w_off * weights.access_latency_s,
        "weighted_accuracy_cost": weights.w_acc * accuracy_cost,
    }


def request_cost_cloud(profile: ModelProfile, weights: CostWeights, task_id: Optional[str] = None) -> dict:
    """Cloud execution: reference accuracy, priced as a flat fee plus core latency."""
    gflops = profile.gflops_for(task_id) if task_id else profile.gflops_per_inference
    compute_s = gflops / weights.cloud_throughput_gflops if weights.cloud_throughput_gflops else math.inf
    return {
        "compute_latency_s": compute_s,
        "latency_s": weights.access_latency_s + weights.core_latency_s + compute_s,
        "accuracy_cost": 0.0,
        "cloud_cost": weights.w_cloud + weights.w_off * weights.core_latency_s,
        "offloading_cost": weights.w_off * weights.access_latency_s,
    }


def aggregate_metrics(records: Sequence[RequestRecord]) -> RunMetrics:
    m = RunMetrics()
    c = m.costs
    for r in records:
        m.request_count += 1
        if r.cloud:
            m.cloud_executions += 1
        else:
            m.edge_executions += 1
        if r.decision == "edge_load":
            m.model_loads += 1
        c.switching_cost += r.switching_cost
        c.total_accuracy_cost += r.weighted_accuracy_cost
        c.edge_inference_latency_cost += r.inference_cost
        c.edge_offloading_latency_cost += r.offloading_cost
        c.cloud_cost += r.cloud_cost
    return m


def run_simulation(catalog: list[ModelProfile], trace: Sequence[Request],
                   server: EdgeServerConfig, aoc: AoCConfig, weights: CostWeights,
                   policy: PolicyKind | str, options: SimOptions = SimOptions(),
                   seed: int = 0, records: Optional[list] = None) -> RunMetrics:
    """Replay ``trace`` under one policy.

    Pass a list as ``records`` to collect the per-request records.
    """
    validate_trace(trace, catalog)
    kind = PolicyKind.parse(policy) if isinstance(policy, str) else policy
    index = catalog_index(catalog)
    acc_models = accuracy_models(catalog)
    state = CacheState()
    store = ContextStore(aoc)
    rng = policy_rng(seed)
    gamma = options.context_overhead_gamma
    out = records if records is not None else []

    for req in trace:
        profile = index[req.model_id]
        now = req.arrival_time_s
        decision = decide(kind, state, store, server, profile, now, rng,
                          options.offload_on_miss, options.admission)

        if isinstance(decision, OffloadToCloud):
            cost = request_cost_cloud(profile, weights, req.task_id)
            k_eff = store.effective(req.model_id, req.task_id, now)
            done = now + cost["latency_s"]
            rec = RequestRecord(
                req.request_id, now, req.model_id, req.task_id, "cloud",
                0.0, 0.0, k_eff, 100.0, 0.0,
                0.0, 0.0, cost["offloading_cost"], cost["cloud_cost"], 0.0,
            )
        else:
            for victim in decision.evictions:
                evict_model(state, victim)
            load_s = 0.0
            if decision.load_required:
                load_s = load_model(state, server, profile, now)
            start = max(now, state.entries[req.model_id].loaded_at_s)
            k_eff = store.effective(req.model_id, req.task_id, start)
            cost = request_cost_edge(profile, req.task_id, acc_models[req.model_id, req.task_id],
                                     k_eff, server, weights, gamma)
            touch(state, req.model_id, start)
            done = start + cost["inference_latency_s"]
            rec = RequestRecord(
                req.request_id, now, req.model_id, req.task_id,
                "edge_load" if decision.load_required else "edge_hit",
                load_s, cost["inference_latency_s"], k_eff, cost["accuracy"],
                cost["accuracy_cost"], weights.w_switch * load_s, cost["inference_cost"],
                cost["offloading_cost"], 0.0, cost["weighted_accuracy_cost"],
            )
        if options.check_invariants:
            state.check(server)
        # Completion order is not arrival order without queueing; keep each
        # model's examples time-ordered.
        last = store.last_time(req.model_id)
        store.record(req.model_id, req.task_id, done if last is None else max(done, last))
        out.append(rec)
    return aggregate_metrics(out)


def format_log(records: Sequence[RequestRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(LOG_HEADER)
    for r in records:
        w.writerow([
            r.request_id, f"{r.arrival_time_s:.6f}", r.model_id, r.task_id, r.decision,
            repr(r.load_latency_s), repr(r.inference_latency_s), repr(r.k_eff),
            repr(r.accuracy), repr(r.accuracy_cost), int(r.cloud),
        ])
    return buf.getvalue()
