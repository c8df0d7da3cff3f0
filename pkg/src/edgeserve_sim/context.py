"""Age of Context: aged demonstration examples per model.

Every served request leaves one demonstration example in its model's store.
An example of age ``a`` contributes ``u(a) * relevance`` to the model's
effective context count, where ``u`` is a non-increasing utility with
``u(0) = 1``.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass, field
from typing import Mapping, Optional

from . import kernels
from .errors import ConfigError, TimeError

UTILITY_KINDS = {
    "exponential": kernels.EXPONENTIAL,
    "linear": kernels.LINEAR,
    "step": kernels.STEP,
}


@dataclass(frozen=True)
class DemonstrationExample:
    created_at_s: float
    task_id: str


@dataclass(frozen=True)
class AoCConfig:
    """Age-utility family and task relevance.

    ``decay_rate`` is the decay constant (1/s) for ``exponential``, the
    horizon (s) at which utility reaches zero for ``linear``, and the cutoff
    age (s) for ``step``.  ``relevance`` maps task -> task -> weight; missing
    off-diagonal entries are 0 and the diagonal is always 1.
    """

    utility_kind: str = "exponential"
    decay_rate: float = 0.01
    relevance: Mapping[str, Mapping[str, float]] = field(default_factory=dict)
    store_capacity: int = 256

    def __post_init__(self):
        if self.utility_kind not in UTILITY_KINDS:
            raise ConfigError(f"unknown utility kind {self.utility_kind!r}", "aoc.utility_kind")
        if not self.decay_rate > 0:
            raise ConfigError("must be > 0", "aoc.decay_rate")
        if self.store_capacity < 1:
            raise ConfigError("must be >= 1", "aoc.store_capacity")
        for a, row in self.relevance.items():
            for b, w in row.items():
                if not 0.0 <= w <= 1.0:
                    raise ConfigError("relevance outside [0, 1]", f"aoc.relevance.{a}.{b}")
                if a != b and self.relevance_of(b, a) != w:
                    raise ConfigError("relevance must be symmetric", f"aoc.relevance.{a}.{b}")

    @property
    def kind_code(self) -> int:
        return UTILITY_KINDS[self.utility_kind]

    def relevance_of(self, example_task: str, query_task: str) -> float:
        if example_task == query_task:
            return 1.0
        row = self.relevance.get(example_task)
        if row is not None and query_task in row:
            return float(row[query_task])
        row = self.relevance.get(query_task)
        if row is not None and example_task in row:
            return float(row[example_task])
        return 0.0


def age_utility(cfg: AoCConfig, age_s: float) -> float:
    return kernels.utility(cfg.kind_code, float(cfg.decay_rate), float(age_s))


class _Examples:
    """Time-ordered examples of one model, oldest first, in flat arrays."""

    __slots__ = ("times", "tasks", "start")

    def __init__(self):
        self.times = array("d")
        self.tasks = array("i")
        self.start = 0

    def __len__(self):
        return len(self.times) - self.start

    def append(self, t, code, capacity):
        self.times.append(t)
        self.tasks.append(code)
        if len(self) > capacity:
            self.start += len(self) - capacity
            if self.start >= capacity:
                del self.times[: self.start]
                del self.tasks[: self.start]
                self.start = 0

    def last_time(self):
        return self.times[-1] if len(self) else None


class ContextStore:
    """Demonstration examples keyed by model id.

    Independent of cache residency: evicting a model leaves its examples in
    place so a reload regains the (aged) context.
    """

    def __init__(self, cfg: Optional[AoCConfig] = None):
        self.cfg = cfg or AoCConfig()
        self._models: dict[str, _Examples] = {}
        self._task_codes: dict[str, int] = {}
        self._task_names: list[str] = []
        self._rows: dict[Optional[str], array] = {}

    def _code(self, task_id: str) -> int:
        code = self._task_codes.get(task_id)
        if code is None:
            code = len(self._task_names)
            self._task_codes[task_id] = code
            self._task_names.append(task_id)
            self._rows.clear()
        return code

    def _weights(self, task_id: Optional[str]) -> array:
        row = self._rows.get(task_id)
        if row is None:
            if task_id is None:
                row = array("d", [1.0] * len(self._task_names))
            else:
                row = array("d", (self.cfg.relevance_of(name, task_id) for name in self._task_names))
            self._rows[task_id] = row
        return row

    def examples(self, model_id: str) -> list[DemonstrationExample]:
        ex = self._models.get(model_id)
        if ex is None:
            return []
        return [
            DemonstrationExample(ex.times[i], self._task_names[ex.tasks[i]])
            for i in range(ex.start, len(ex.times))
        ]

    def count(self, model_id: str) -> int:
        ex = self._models.get(model_id)
        return 0 if ex is None else len(ex)

    def last_time(self, model_id: str) -> Optional[float]:
        ex = self._models.get(model_id)
        return None if ex is None else ex.last_time()

    def record(self, model_id: str, task_id: str, now_s: float) -> None:
        if now_s < 0:
            raise TimeError(f"example time {now_s} is negative")
        ex = self._models.get(model_id)
        if ex is None:
            ex = self._models[model_id] = _Examples()
        last = ex.last_time()
        if last is not None and now_s < last:
            raise TimeError(f"model {model_id!r}: time {now_s} precedes last example at {last}")
        ex.append(float(now_s), self._code(task_id), self.cfg.store_capacity)

    def effective(self, model_id: str, task_id: Optional[str], now_s: float) -> float:
        """Utility-weighted example count at ``now_s``.

        ``task_id=None`` weights every example by 1 regardless of task.
        Examples stamped after ``now_s`` are not yet available and count 0.
        """
        ex = self._models.get(model_id)
        if ex is None or len(ex) == 0:
            return 0.0
        return kernels.context_sum(
            ex.times, ex.tasks, ex.start, len(ex.times), float(now_s),
            self.cfg.kind_code, float(self.cfg.decay_rate), self._weights(task_id),
        )


def record_example(store: ContextStore, model_id: str, task_id: str, now_s: float) -> None:
    store.record(model_id, task_id, now_s)


def effective_context(store: ContextStore, model_id: str, task_id: Optional[str],
                      cfg: Optional[AoCConfig] = None, now_s: float = 0.0) -> float:
    if cfg is not None and cfg != store.cfg:
        raise ValueError("store was built with a different AoCConfig")
    return store.effective(model_id, task_id, now_s)
