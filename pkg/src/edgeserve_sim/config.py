"""Experiment configuration (JSON) with path-qualified error messages."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from numbers import Real
from pathlib import Path
from typing import Optional

from .catalog import ModelProfile, builtin_catalog, load_catalog, parse_catalog
from .context import AoCConfig
from .edgecache import EdgeServerConfig
from .errors import ConfigError, SchemaError, SimError
from .policy import POLICY_ORDER, PolicyKind
from .simcost import CostWeights, SimOptions
from .workload import WorkloadConfig, validate_workload

DEFAULT_CONFIG = Path(__file__).with_name("default.json")


class UnknownPolicy(ConfigError):
    pass


@dataclass
class ExperimentConfig:
    catalog: list[ModelProfile]
    server: EdgeServerConfig
    aoc: AoCConfig = field(default_factory=AoCConfig)
    weights: CostWeights = field(default_factory=CostWeights)
    options: SimOptions = field(default_factory=SimOptions)
    policies: list[PolicyKind] = field(default_factory=lambda: list(POLICY_ORDER))
    seeds: list[int] = field(default_factory=lambda: [0])
    # Exactly one of these is set.
    workload: Optional[WorkloadConfig] = None
    trace_path: Optional[Path] = None

    def workload_for(self, seed: int) -> WorkloadConfig:
        return replace(self.workload, seed=seed)


def _number(obj, key, path, default=None, kind="number"):
    where = f"{path}.{key}"
    if key not in obj:
        if default is None:
            raise ConfigError("missing field", where)
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, Real):
        raise ConfigError(f"expected number, got {type(v).__name__}", where)
    if kind == "int" and v != int(v):
        raise ConfigError("expected integer", where)
    return int(v) if kind == "int" else v


def _bool(obj, key, path, default):
    v = obj.get(key, default)
    if not isinstance(v, bool):
        raise ConfigError("expected true/false", f"{path}.{key}")
    return v


def _object(doc, key, required=False):
    if key not in doc:
        if required:
            raise ConfigError("missing section", key)
        return {}
    v = doc[key]
    if not isinstance(v, dict):
        raise ConfigError("expected object", key)
    return v


def parse_policy(name) -> PolicyKind:
    try:
        return PolicyKind.parse(name)
    except ValueError:
        raise UnknownPolicy(f"unknown policy {name!r}", "policy") from None


def _parse_catalog(doc, base: Path) -> list[ModelProfile]:
    source = doc.get("catalog", "builtin")
    if source == "builtin":
        return builtin_catalog()
    if isinstance(source, str):
        return load_catalog(base / source)
    if isinstance(source, dict):
        return parse_catalog(source, "catalog")
    raise ConfigError("expected \"builtin\", a path, or an object", "catalog")


def _parse_workload(doc, catalog) -> WorkloadConfig:
    w = _object(doc, "workload")
    model_ids = w.get("model_ids", [m.id for m in catalog])
    if not isinstance(model_ids, list) or not all(isinstance(m, str) for m in model_ids):
        raise ConfigError("expected list of model ids", "workload.model_ids")
    task_weights = w.get("task_weights", {})
    if not isinstance(task_weights, dict) or not all(isinstance(v, dict) for v in task_weights.values()):
        raise ConfigError("expected {model: {task: weight}}", "workload.task_weights")
    cfg = WorkloadConfig(
        seed=0,
        duration_s=_number(w, "duration_s", "workload"),
        arrival_rate_hz=_number(w, "arrival_rate_hz", "workload"),
        zipf_exponent=_number(w, "zipf_exponent", "workload", 0.0),
        model_ids=tuple(model_ids),
        task_weights=task_weights,
    )
    validate_workload(cfg, catalog)
    return cfg


def _parse_aoc(doc) -> AoCConfig:
    a = _object(doc, "aoc")
    relevance = a.get("relevance", {})
    if not isinstance(relevance, dict) or not all(isinstance(v, dict) for v in relevance.values()):
        raise ConfigError("expected {task: {task: weight}}", "aoc.relevance")
    kind = a.get("utility_kind", "exponential")
    if not isinstance(kind, str):
        raise ConfigError("expected string", "aoc.utility_kind")
    return AoCConfig(
        utility_kind=kind,
        decay_rate=_number(a, "decay_rate", "aoc", 0.01),
        relevance=relevance,
        store_capacity=_number(a, "store_capacity", "aoc", 256, "int"),
    )


def parse_config(doc, base: Path = Path(".")) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ConfigError("expected a JSON object", "$")
    catalog = _parse_catalog(doc, base)

    s = _object(doc, "server", required=True)
    server = EdgeServerConfig(
        gpu_memory_bytes=_number(s, "gpu_memory_bytes", "server", kind="int"),
        load_bandwidth_bytes_per_s=_number(s, "load_bandwidth_bytes_per_s", "server"),
        edge_throughput_gflops=_number(s, "edge_throughput_gflops", "server"),
    )

    w = _object(doc, "weights")
    defaults = CostWeights()
    weights = CostWeights(**{
        k: _number(w, k, "weights", getattr(defaults, k)) for k in defaults.__dataclass_fields__
    })
    unknown = set(w) - set(defaults.__dataclass_fields__)
    if unknown:
        raise ConfigError("unknown field", f"weights.{sorted(unknown)[0]}")

    o = _object(doc, "options")
    options = SimOptions(
        offload_on_miss=_bool(o, "offload_on_miss", "options", False),
        admission=_bool(o, "admission", "options", False),
        context_overhead_gamma=_number(o, "context_overhead_gamma", "options", 0.01),
        log=_bool(o, "log", "options", False),
    )
    if options.context_overhead_gamma < 0:
        raise ConfigError("must be >= 0", "options.context_overhead_gamma")

    if "policy" in doc and "policies" in doc:
        raise ConfigError("give either policy or policies", "policies")
    if "policy" in doc:
        policies = [parse_policy(doc["policy"])]
    elif "policies" in doc:
        if not isinstance(doc["policies"], list) or not doc["policies"]:
            raise ConfigError("expected nonempty list", "policies")
        policies = [parse_policy(p) for p in doc["policies"]]
    else:
        policies = list(POLICY_ORDER)

    has_workload = "workload" in doc
    has_trace = "trace" in doc
    if has_workload == has_trace:
        raise ConfigError("give exactly one of workload or trace", "workload")

    seeds = doc.get("seeds", None if has_workload else [0])
    if seeds is None:
        raise ConfigError("missing field", "seeds")
    if (not isinstance(seeds, list) or not seeds
            or not all(isinstance(x, int) and not isinstance(x, bool) and 0 <= x < 2**64 for x in seeds)):
        raise ConfigError("expected nonempty list of 64-bit unsigned integers", "seeds")

    cfg = ExperimentConfig(
        catalog=catalog,
        server=server,
        aoc=_parse_aoc(doc),
        weights=weights,
        options=options,
        policies=policies,
        seeds=list(seeds),
    )
    if has_workload:
        cfg.workload = _parse_workload(doc, catalog)
    else:
        if not isinstance(doc["trace"], str):
            raise ConfigError("expected a path", "trace")
        cfg.trace_path = base / doc["trace"]
    return cfg


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}", os.fspath(path)) from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}", os.fspath(path)) from exc
    return parse_config(doc, path.parent)


def default_config() -> ExperimentConfig:
    return load_config(DEFAULT_CONFIG)
