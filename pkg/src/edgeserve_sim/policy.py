"""Cache decisions: serve at the edge (possibly after evicting) or offload.

Victim keys, smallest evicted first:

* ``fifo``   load order (``fifo_seq``)
* ``lfu``    (use_count, last_used_s, model_id)
* ``lc``     (AoC-weighted example count, last_used_s, model_id)
* ``random`` uniform draw from the policy's own generator
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .catalog import ModelProfile, memory_footprint
from .context import ContextStore
from .edgecache import CacheState, EdgeServerConfig, bytes_to_free, is_cached
from .errors import Infeasible


class PolicyKind(str, enum.Enum):
    RANDOM = "random"
    CLOUD_ONLY = "cloud"
    FIFO = "fifo"
    LFU = "lfu"
    LC = "lc"

    @classmethod
    def parse(cls, name: str) -> "PolicyKind":
        if name == "cloud_only":
            return cls.CLOUD_ONLY
        return cls(name)


# Table order used for reports.
POLICY_ORDER = (PolicyKind.RANDOM, PolicyKind.CLOUD_ONLY, PolicyKind.FIFO,
                PolicyKind.LFU, PolicyKind.LC)


@dataclass(frozen=True)
class ServeAtEdge:
    evictions: tuple[str, ...] = ()
    load_required: bool = False


@dataclass(frozen=True)
class OffloadToCloud:
    pass


Decision = Union[ServeAtEdge, OffloadToCloud]


def policy_rng(seed: int) -> np.random.Generator:
    """Generator for the random policy, independent of the workload stream."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, 0x52414E44])))


def victim_key(kind: PolicyKind, state: CacheState, store: Optional[ContextStore],
               model_id: str, now_s: float):
    entry = state.entries[model_id]
    if kind is PolicyKind.FIFO:
        return (entry.fifo_seq,)
    if kind is PolicyKind.LFU:
        return (entry.use_count, entry.last_used_s, model_id)
    if kind is PolicyKind.LC:
        return (store.effective(model_id, None, now_s), entry.last_used_s, model_id)
    raise ValueError(f"policy {kind.value!r} has no ordering key")


def incoming_key(kind: PolicyKind, store: Optional[ContextStore], model_id: str,
                 now_s: float) -> float:
    """Primary key of a model that is not resident.

    LFU counts uses since load, so a non-resident model has none.  LC reads
    the context store, which outlives evictions.
    """
    if kind is PolicyKind.LFU:
        return 0
    if kind is PolicyKind.LC:
        return store.effective(model_id, None, now_s)
    raise ValueError(f"policy {kind.value!r} has no admission key")


def select_victims(kind: PolicyKind, state: CacheState, store: Optional[ContextStore],
                   bytes_needed: int, now_s: float,
                   rng: Optional[np.random.Generator] = None) -> list[str]:
    """Evict greedily by policy key until at least ``bytes_needed`` are freed."""
    if bytes_needed > state.used_bytes:
        raise Infeasible(f"need {bytes_needed} bytes, only {state.used_bytes} cached")
    kind = PolicyKind(kind)
    victims: list[str] = []
    freed = 0
    if kind is PolicyKind.RANDOM:
        if rng is None:
            raise ValueError("random policy needs a generator")
        remaining = sorted(state.entries)
        while freed < bytes_needed:
            victim = remaining.pop(int(rng.integers(len(remaining))))
            victims.append(victim)
            freed += state.entries[victim].footprint_bytes
        return victims
    # Keys do not depend on which models were already chosen, so one sort
    # gives the greedy order.
    ranked = sorted(state.entries, key=lambda m: victim_key(kind, state, store, m, now_s))
    for victim in ranked:
        if freed >= bytes_needed:
            break
        victims.append(victim)
        freed += state.entries[victim].footprint_bytes
    return victims


def decide(kind: PolicyKind, state: CacheState, store: Optional[ContextStore],
           server: EdgeServerConfig, profile: ModelProfile, now_s: float,
           rng: Optional[np.random.Generator] = None,
           offload_on_miss: bool = False, admission: bool = False) -> Decision:
    """Serve at the edge or offload one request for ``profile``.

    With ``admission`` set, key-ordered policies (lfu, lc) load a missing
    model only if its own key beats the key of every victim it would
    displace; otherwise the request goes to the cloud.  FIFO and random
    always admit.
    """
    kind = PolicyKind(kind)
    if kind is PolicyKind.CLOUD_ONLY:
        return OffloadToCloud()
    if is_cached(state, profile.id):
        return ServeAtEdge()
    footprint = memory_footprint(profile)
    if offload_on_miss or footprint > server.gpu_memory_bytes:
        return OffloadToCloud()
    needed = bytes_to_free(state, server, footprint)
    if needed == 0:
        return ServeAtEdge((), True)
    victims = select_victims(kind, state, store, needed, now_s, rng)
    if admission and kind in (PolicyKind.LFU, PolicyKind.LC):
        incoming = incoming_key(kind, store, profile.id, now_s)
        if not all(incoming > victim_key(kind, state, store, v, now_s)[0] for v in victims):
            return OffloadToCloud()
    return ServeAtEdge(tuple(victims), True)
