"""Edge-server GPU memory as a whole-model cache."""

from __future__ import annotations

from dataclasses import dataclass, field

from .catalog import ModelProfile, memory_footprint
from .errors import (AlreadyCached, ConfigError, InsufficientMemory, ModelTooLarge,
                     NotCached)


@dataclass(frozen=True)
class EdgeServerConfig:
    gpu_memory_bytes: int
    load_bandwidth_bytes_per_s: float
    edge_throughput_gflops: float

    def __post_init__(self):
        for name in ("gpu_memory_bytes", "load_bandwidth_bytes_per_s", "edge_throughput_gflops"):
            if not getattr(self, name) > 0:
                raise ConfigError("must be > 0", f"server.{name}")


@dataclass
class CachedModelEntry:
    model_id: str
    footprint_bytes: int
    loaded_at_s: float
    last_used_s: float
    use_count: int
    fifo_seq: int


@dataclass
class CacheState:
    entries: dict[str, CachedModelEntry] = field(default_factory=dict)
    used_bytes: int = 0
    next_fifo_seq: int = 0

    def check(self, cfg: EdgeServerConfig) -> None:
        """Assert the accounting invariants (used by tests and debug runs)."""
        total = sum(e.footprint_bytes for e in self.entries.values())
        assert self.used_bytes == total, (self.used_bytes, total)
        assert self.used_bytes <= cfg.gpu_memory_bytes, (self.used_bytes, cfg.gpu_memory_bytes)


def is_cached(state: CacheState, model_id: str) -> bool:
    return model_id in state.entries


def bytes_to_free(state: CacheState, cfg: EdgeServerConfig, footprint_bytes: int) -> int:
    if footprint_bytes > cfg.gpu_memory_bytes:
        raise ModelTooLarge(
            f"{footprint_bytes} bytes exceeds GPU memory of {cfg.gpu_memory_bytes}"
        )
    return max(0, state.used_bytes + footprint_bytes - cfg.gpu_memory_bytes)


def evict_model(state: CacheState, model_id: str) -> int:
    entry = state.entries.pop(model_id, None)
    if entry is None:
        raise NotCached(model_id)
    state.used_bytes -= entry.footprint_bytes
    return entry.footprint_bytes


def load_latency(cfg: EdgeServerConfig, profile: ModelProfile) -> float:
    bandwidth = profile.load_bandwidth_bytes_per_s or cfg.load_bandwidth_bytes_per_s
    return memory_footprint(profile) / bandwidth


def load_model(state: CacheState, cfg: EdgeServerConfig, profile: ModelProfile,
               now_s: float) -> float:
    """Insert ``profile`` and return the load latency in seconds.

    The caller evicts first; loading into insufficient memory is an error.
    """
    if profile.id in state.entries:
        raise AlreadyCached(profile.id)
    footprint = memory_footprint(profile)
    missing = bytes_to_free(state, cfg, footprint)
    if missing:
        raise InsufficientMemory(f"{profile.id}: {missing} more bytes needed")
    latency = load_latency(cfg, profile)
    ready = now_s + latency
    state.entries[profile.id] = CachedModelEntry(
        model_id=profile.id,
        footprint_bytes=footprint,
        loaded_at_s=ready,
        last_used_s=ready,
        use_count=0,
        fifo_seq=state.next_fifo_seq,
    )
    state.next_fifo_seq += 1
    state.used_bytes += footprint
    return latency


def touch(state: CacheState, model_id: str, now_s: float) -> None:
    entry = state.entries.get(model_id)
    if entry is None:
        raise NotCached(model_id)
    entry.use_count += 1
    entry.last_used_s = now_s
