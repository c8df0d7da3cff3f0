"""Model/task catalog and the context-dependent accuracy curve.

Accuracy as a function of the number of in-context examples ``k`` is

    a(k) = a0 + gain * log2(1 + min(k, k_max) ** alpha)

clamped at 100.  ``gain`` is the one-shot improvement over zero-shot so the
curve passes through the zero-shot score at k=0 and the one-shot score at
k=1 for every alpha; alpha is then fitted so the curve hits the few-shot
score at the reference example count.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from typing import Optional

from .errors import CalibrationError, InvariantError, IoError, SchemaError

ALPHA_LOW = 1e-6
ALPHA_HIGH = 10.0
ALPHA_TOL = 1e-9


@dataclass(frozen=True)
class TaskProfile:
    task_id: str
    zero_shot_score: float
    one_shot_score: Optional[float] = None
    few_shot_score: Optional[float] = None
    few_shot_k: Optional[int] = None
    # Per-task variants (UniFormer ships a different head per task).
    params_millions: Optional[float] = None
    gflops_per_inference: Optional[float] = None


@dataclass(frozen=True)
class ModelProfile:
    id: str
    params_millions: float
    gflops_per_inference: float
    tasks: tuple[TaskProfile, ...]
    bytes_per_param: float = 2
    context_window: int = 0
    load_bandwidth_bytes_per_s: Optional[float] = None

    def task(self, task_id: str) -> TaskProfile:
        for t in self.tasks:
            if t.task_id == task_id:
                return t
        raise KeyError(f"model {self.id!r} has no task {task_id!r}")

    def task_ids(self) -> list[str]:
        return [t.task_id for t in self.tasks]

    def gflops_for(self, task_id: str) -> float:
        t = self.task(task_id)
        return t.gflops_per_inference if t.gflops_per_inference is not None else self.gflops_per_inference

    def window_for(self, task_id: str) -> int:
        """Context window for one task: the task's reference K when published."""
        t = self.task(task_id)
        if self.context_window == 0:
            return 0
        if t.few_shot_k is not None:
            return min(t.few_shot_k, self.context_window)
        return self.context_window


@dataclass(frozen=True)
class AccuracyModel:
    a0: float
    a1_gain: float
    alpha: float
    k_max: float


def memory_footprint(profile: ModelProfile) -> int:
    """GPU bytes needed to hold the model's weights, rounded up."""
    exact = Fraction(repr(profile.params_millions)) * 10**6 * Fraction(repr(profile.bytes_per_param))
    return math.ceil(exact)


def accuracy_at(model: AccuracyModel, k_eff: float) -> float:
    k = min(k_eff, model.k_max)
    if k <= 0:
        return min(100.0, model.a0)
    return min(100.0, model.a0 + model.a1_gain * math.log2(1.0 + k**model.alpha))


def calibrate_accuracy(task: TaskProfile, k_max: float) -> AccuracyModel:
    """Fit the accuracy curve to a task's zero/one/few-shot scores.

    Raises CalibrationError when the few-shot score cannot be reached for any
    alpha in (1e-6, 10), e.g. when it lies below the one-shot score.
    """
    a0 = float(task.zero_shot_score)
    if task.one_shot_score is None:
        return AccuracyModel(a0, 0.0, 1.0, k_max)
    gain = max(0.0, float(task.one_shot_score) - a0)
    if task.few_shot_score is None:
        return AccuracyModel(a0, gain, 1.0, k_max)

    target = float(task.few_shot_score)
    k_ref = float(task.few_shot_k)
    if gain == 0.0:
        if abs(target - a0) <= ALPHA_TOL:
            return AccuracyModel(a0, 0.0, 1.0, k_max)
        raise CalibrationError(
            f"task {task.task_id!r}: zero gain cannot reach few-shot score {target}"
        )

    def residual(alpha: float) -> float:
        return a0 + gain * math.log2(1.0 + k_ref**alpha) - target

    lo, hi = ALPHA_LOW, ALPHA_HIGH
    f_lo, f_hi = residual(lo), residual(hi)
    if not (f_lo <= 0.0 <= f_hi):
        raise CalibrationError(
            f"task {task.task_id!r}: few-shot score {target} not bracketed for "
            f"alpha in ({lo}, {hi}) (one-shot {task.one_shot_score})"
        )
    while hi - lo > ALPHA_TOL:
        mid = 0.5 * (lo + hi)
        if residual(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return AccuracyModel(a0, gain, 0.5 * (lo + hi), k_max)


def _lfm(model_id, params, gflops, tasks):
    return ModelProfile(
        id=model_id,
        params_millions=params,
        gflops_per_inference=gflops,
        context_window=max(t.few_shot_k for t in tasks),
        tasks=tuple(tasks),
    )


def _variant_model(model_id, rows):
    # Model-level size/compute cover the largest task variant.
    tasks = tuple(
        TaskProfile(task_id, score, params_millions=size, gflops_per_inference=gf)
        for task_id, size, gf, score in rows
    )
    return ModelProfile(
        id=model_id,
        params_millions=max(r[1] for r in rows),
        gflops_per_inference=max(r[2] for r in rows),
        tasks=tasks,
    )


def builtin_catalog() -> list[ModelProfile]:
    """The six reference models with their published sizes and scores."""
    uniformer_rows = ("image-classification", "video-classification",
                      "object-detection-instance-segmentation", "semantic-segmentation",
                      "pose-estimation")
    return [
        _lfm("gpt3-13b", 12850, 26.54, [
            TaskProfile("translation", 15.45, 26.12, 30.83, 64),
            TaskProfile("basic-arithmetic", 3.79, 15.98, 14.34, 50),
            TaskProfile("superglue", 54.4, 64.3, 66.9, 32),
        ]),
        _lfm("gpt3-175b", 174600, 354.03, [
            TaskProfile("translation", 22.03, 29.63, 33.77, 64),
            TaskProfile("basic-arithmetic", 25.99, 40.71, 49.55, 50),
            TaskProfile("superglue", 58.2, 68.9, 73.2, 32),
        ]),
        _variant_model("uniformer-s", list(zip(
            uniformer_rows, (22, 22, 41, 25, 25), (3.6, 167, 269, 247, 4.7),
            (82.9, 82.8, 45.6, 46.6, 74.0)))),
        _variant_model("uniformer-b", list(zip(
            uniformer_rows, (50, 22, 69, 54, 54), (8.3, 389, 399, 471, 9.2),
            (83.9, 84.0, 47.4, 48.0, 75.0)))),
        ModelProfile("clip-vit-l14", 428, 175.5, tasks=(
            TaskProfile("classification", 75.20),
            TaskProfile("image-retrieval", 71.08),
            TaskProfile("text-retrieval", 84.00),
        )),
        ModelProfile("clip-vit-h14", 986, 381.9, tasks=(
            TaskProfile("classification", 77.97),
            TaskProfile("image-retrieval", 73.43),
            TaskProfile("text-retrieval", 86.04),
        )),
    ]


def accuracy_models(catalog: list[ModelProfile]) -> dict[tuple[str, str], AccuracyModel]:
    """Accuracy curve for every (model, task) pair in a catalog.

    Tasks whose few-shot point cannot be fitted fall back to the zero/one-shot
    curve with alpha = 1.
    """
    out = {}
    for m in catalog:
        for t in m.tasks:
            window = m.window_for(t.task_id)
            try:
                out[m.id, t.task_id] = calibrate_accuracy(t, window)
            except CalibrationError:
                gain = max(0.0, t.one_shot_score - t.zero_shot_score)
                out[m.id, t.task_id] = AccuracyModel(float(t.zero_shot_score), gain, 1.0, window)
    return out


# -- JSON (de)serialization ---------------------------------------------------

def _task_to_json(t: TaskProfile) -> dict:
    d = {"task_id": t.task_id, "zero_shot_score": t.zero_shot_score}
    for key in ("one_shot_score", "few_shot_score", "few_shot_k",
                "params_millions", "gflops_per_inference"):
        value = getattr(t, key)
        if value is not None:
            d[key] = value
    return d


def catalog_to_json(catalog: list[ModelProfile]) -> dict:
    models = []
    for m in catalog:
        d = {
            "id": m.id,
            "params_millions": m.params_millions,
            "gflops_per_inference": m.gflops_per_inference,
            "bytes_per_param": m.bytes_per_param,
            "context_window": m.context_window,
        }
        if m.load_bandwidth_bytes_per_s is not None:
            d["load_bandwidth_bytes_per_s"] = m.load_bandwidth_bytes_per_s
        d["tasks"] = [_task_to_json(t) for t in m.tasks]
        models.append(d)
    return {"models": models}


def write_catalog(catalog: list[ModelProfile], path) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(catalog_to_json(catalog), fh, indent=2)
            fh.write("\n")
    except OSError as exc:
        raise IoError(f"cannot write catalog {os.fspath(path)!r}: {exc}") from exc


def _is_number(v) -> bool:
    return isinstance(v, Real) and not isinstance(v, bool)


def _field(obj: dict, key: str, path: str, kind="number", required=True):
    if key not in obj:
        if required:
            raise SchemaError("missing field", f"{path}.{key}")
        return None
    v = obj[key]
    ok = {
        "number": _is_number(v),
        "int": isinstance(v, int) and not isinstance(v, bool),
        "str": isinstance(v, str),
        "list": isinstance(v, list),
    }[kind]
    if not ok:
        raise SchemaError(f"expected {kind}, got {type(v).__name__}", f"{path}.{key}")
    return v


def _parse_task(obj, path) -> TaskProfile:
    if not isinstance(obj, dict):
        raise SchemaError("expected object", path)
    task = TaskProfile(
        task_id=_field(obj, "task_id", path, "str"),
        zero_shot_score=_field(obj, "zero_shot_score", path),
        one_shot_score=_field(obj, "one_shot_score", path, required=False),
        few_shot_score=_field(obj, "few_shot_score", path, required=False),
        few_shot_k=_field(obj, "few_shot_k", path, "int", required=False),
        params_millions=_field(obj, "params_millions", path, required=False),
        gflops_per_inference=_field(obj, "gflops_per_inference", path, required=False),
    )
    for key in ("zero_shot_score", "one_shot_score", "few_shot_score"):
        v = getattr(task, key)
        if v is not None and not 0 <= v <= 100:
            raise InvariantError(f"score {v} outside [0, 100]", f"{path}.{key}")
    if task.few_shot_score is not None:
        if task.one_shot_score is None:
            raise InvariantError("few-shot score requires one-shot score", f"{path}.one_shot_score")
        if task.few_shot_k is None or task.few_shot_k < 2:
            raise InvariantError("few-shot score requires few_shot_k >= 2", f"{path}.few_shot_k")
    for key in ("params_millions", "gflops_per_inference"):
        v = getattr(task, key)
        if v is not None and v <= 0:
            raise InvariantError(f"{key} must be > 0", f"{path}.{key}")
    return task


def _parse_model(obj, path) -> ModelProfile:
    if not isinstance(obj, dict):
        raise SchemaError("expected object", path)
    tasks_raw = _field(obj, "tasks", path, "list")
    tasks = tuple(_parse_task(t, f"{path}.tasks[{i}]") for i, t in enumerate(tasks_raw))
    bpp = _field(obj, "bytes_per_param", path, required=False)
    window = _field(obj, "context_window", path, "int", required=False)
    model = ModelProfile(
        id=_field(obj, "id", path, "str"),
        params_millions=_field(obj, "params_millions", path),
        gflops_per_inference=_field(obj, "gflops_per_inference", path),
        bytes_per_param=2 if bpp is None else bpp,
        context_window=0 if window is None else window,
        load_bandwidth_bytes_per_s=_field(obj, "load_bandwidth_bytes_per_s", path, required=False),
        tasks=tasks,
    )
    for key in ("params_millions", "gflops_per_inference", "bytes_per_param"):
        if getattr(model, key) <= 0:
            raise InvariantError(f"{key} must be > 0", f"{path}.{key}")
    if model.context_window < 0:
        raise InvariantError("context_window must be >= 0", f"{path}.context_window")
    bw = model.load_bandwidth_bytes_per_s
    if bw is not None and bw <= 0:
        raise InvariantError("load bandwidth must be > 0", f"{path}.load_bandwidth_bytes_per_s")
    if not tasks:
        raise InvariantError("model needs at least one task", f"{path}.tasks")
    seen = set()
    for i, t in enumerate(tasks):
        if t.task_id in seen:
            raise SchemaError(f"duplicate task id {t.task_id!r}", f"{path}.tasks[{i}].task_id")
        seen.add(t.task_id)
        if model.context_window == 0 and (t.one_shot_score is not None or t.few_shot_score is not None):
            raise InvariantError(
                "one-/few-shot scores need a nonzero context window", f"{path}.tasks[{i}]"
            )
    return model


def parse_catalog(doc, path="") -> list[ModelProfile]:
    if not isinstance(doc, dict):
        raise SchemaError("expected object with 'models'", path or "$")
    prefix = f"{path}.models" if path else "models"
    if "models" not in doc:
        raise SchemaError("missing field", prefix)
    if not isinstance(doc["models"], list):
        raise SchemaError("expected list", prefix)
    models = []
    seen = set()
    for i, m in enumerate(doc["models"]):
        model = _parse_model(m, f"{prefix}[{i}]")
        if model.id in seen:
            raise SchemaError(f"duplicate model id {model.id!r}", f"{prefix}[{i}].id")
        seen.add(model.id)
        models.append(model)
    return models


def load_catalog(path) -> list[ModelProfile]:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read catalog {os.fspath(path)!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    return parse_catalog(doc)


def catalog_index(catalog: list[ModelProfile]) -> dict[str, ModelProfile]:
    return {m.id: m for m in catalog}
