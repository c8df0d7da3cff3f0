"""Seeded request traces: Poisson arrivals, Zipf model popularity.

Randomness comes from numpy's PCG64 bit generator seeded directly with the
config seed.  Draw order is fixed: all inter-arrival uniforms first (in
blocks), then one uniform per request for the model, then one per request
for the task.  Arrival times are rounded to microseconds, the resolution of
the trace file, so written traces read back identically.
"""

from __future__ import annotations

import csv
import math
import os
import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .catalog import ModelProfile, catalog_index
from .errors import ConfigError, FormatError, IoError, ValidationError

TRACE_HEADER = ("arrival_time_s", "request_id", "model_id", "task_id")
_ID_RE = re.compile(r"^[a-z0-9_-]+$")
_BLOCK = 4096


@dataclass(frozen=True)
class WorkloadConfig:
    seed: int
    duration_s: float
    arrival_rate_hz: float
    model_ids: Sequence[str]
    zipf_exponent: float = 0.0
    # model id -> task id -> weight; a model without an entry draws its tasks uniformly.
    task_weights: Mapping[str, Mapping[str, float]] = field(default_factory=dict)


@dataclass(frozen=True)
class Request:
    arrival_time_s: float
    request_id: int
    model_id: str
    task_id: str


def validate_workload(cfg: WorkloadConfig, catalog: list[ModelProfile]) -> None:
    if not cfg.duration_s > 0:
        raise ConfigError("must be > 0", "workload.duration_s")
    if not cfg.arrival_rate_hz > 0:
        raise ConfigError("must be > 0", "workload.arrival_rate_hz")
    if not cfg.zipf_exponent >= 0:
        raise ConfigError("must be >= 0", "workload.zipf_exponent")
    if not 0 <= cfg.seed < 2**64:
        raise ConfigError("must be a 64-bit unsigned integer", "seeds")
    if not cfg.model_ids:
        raise ConfigError("must be nonempty", "workload.model_ids")
    index = catalog_index(catalog)
    for i, mid in enumerate(cfg.model_ids):
        if mid not in index:
            raise ConfigError(f"unknown model {mid!r}", f"workload.model_ids[{i}]")
    if len(set(cfg.model_ids)) != len(cfg.model_ids):
        raise ConfigError("duplicate model id", "workload.model_ids")
    for mid, weights in cfg.task_weights.items():
        if mid not in index:
            raise ConfigError(f"unknown model {mid!r}", f"workload.task_weights.{mid}")
        known = set(index[mid].task_ids())
        for tid, w in weights.items():
            if tid not in known:
                raise ConfigError(f"unknown task {tid!r}", f"workload.task_weights.{mid}.{tid}")
            if not w >= 0:
                raise ConfigError("weight must be >= 0", f"workload.task_weights.{mid}.{tid}")
        if not sum(weights.values()) > 0:
            raise ConfigError("task weights sum to zero", f"workload.task_weights.{mid}")


def zipf_probabilities(n: int, exponent: float) -> np.ndarray:
    ranks = np.arange(1, n + 1, dtype=np.float64)
    w = ranks**-exponent
    return w / w.sum()


def _categorical(u: np.ndarray, probs: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    return np.searchsorted(cdf, u, side="right")


def generate_trace(cfg: WorkloadConfig, catalog: list[ModelProfile]) -> list[Request]:
    validate_workload(cfg, catalog)
    rng = np.random.Generator(np.random.PCG64(cfg.seed))

    chunks = []
    t = 0.0
    while True:
        u = rng.random(_BLOCK)
        times = t + np.cumsum(-np.log1p(-u) / cfg.arrival_rate_hz)
        past = np.flatnonzero(times > cfg.duration_s)
        if past.size:
            chunks.append(times[: past[0]])
            break
        chunks.append(times)
        t = float(times[-1])
    arrivals = np.round(np.concatenate(chunks), 6)
    n = arrivals.size

    model_ix = _categorical(rng.random(n), zipf_probabilities(len(cfg.model_ids), cfg.zipf_exponent))
    task_u = rng.random(n)

    index = catalog_index(catalog)
    task_tables = []
    for mid in cfg.model_ids:
        ids = index[mid].task_ids()
        weights = cfg.task_weights.get(mid)
        w = np.array([float(weights.get(t, 0.0)) if weights else 1.0 for t in ids])
        task_tables.append((ids, w / w.sum()))

    trace = []
    for i in range(n):
        ids, probs = task_tables[model_ix[i]]
        tix = int(_categorical(task_u[i : i + 1], probs)[0])
        trace.append(Request(float(arrivals[i]), i, cfg.model_ids[model_ix[i]], ids[tix]))
    return trace


def write_trace(trace: Sequence[Request], path) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(",".join(TRACE_HEADER) + "\n")
            for r in trace:
                fh.write(f"{r.arrival_time_s:.6f},{r.request_id},{r.model_id},{r.task_id}\n")
    except OSError as exc:
        raise IoError(f"cannot write trace {os.fspath(path)!r}: {exc}") from exc


def read_trace(path, catalog: list[ModelProfile]) -> list[Request]:
    index = catalog_index(catalog)
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise IoError(f"cannot read trace {os.fspath(path)!r}: {exc}") from exc
    if not rows or tuple(rows[0]) != TRACE_HEADER:
        raise FormatError(f"header must be {','.join(TRACE_HEADER)}", line=1)
    trace = []
    last_time = -math.inf
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(TRACE_HEADER):
            raise FormatError(f"expected {len(TRACE_HEADER)} fields, got {len(row)}", line=lineno)
        raw_time, raw_id, model_id, task_id = row
        try:
            t = float(raw_time)
        except ValueError:
            raise FormatError(f"not a number: {raw_time!r}", lineno, "arrival_time_s") from None
        if not math.isfinite(t) or t < 0:
            raise FormatError(f"invalid time {raw_time!r}", lineno, "arrival_time_s")
        try:
            rid = int(raw_id)
        except ValueError:
            raise FormatError(f"not an integer: {raw_id!r}", lineno, "request_id") from None
        for col, value in (("model_id", model_id), ("task_id", task_id)):
            if not _ID_RE.match(value):
                raise FormatError(f"invalid identifier {value!r}", lineno, col)
        if t < last_time:
            raise ValidationError(f"arrival time {t} decreases", lineno, "arrival_time_s")
        if rid != len(trace):
            raise ValidationError(f"request id {rid} is not consecutive", lineno, "request_id")
        if model_id not in index:
            raise ValidationError(f"unknown model {model_id!r}", lineno, "model_id")
        if task_id not in index[model_id].task_ids():
            raise ValidationError(f"unknown task {task_id!r} for {model_id!r}", lineno, "task_id")
        last_time = t
        trace.append(Request(t, rid, model_id, task_id))
    return trace


def validate_trace(trace: Sequence[Request], catalog: list[ModelProfile]) -> None:
    index = catalog_index(catalog)
    last = -math.inf
    for i, r in enumerate(trace):
        if r.arrival_time_s < last or r.arrival_time_s < 0:
            raise ValidationError(f"request {i}: arrival time decreases")
        if r.request_id != i:
            raise ValidationError(f"request {i}: id {r.request_id} is not consecutive")
        if r.model_id not in index or r.task_id not in index[r.model_id].task_ids():
            raise ValidationError(f"request {i}: unknown ({r.model_id}, {r.task_id})")
        last = r.arrival_time_s
