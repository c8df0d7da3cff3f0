"""Brute-force reference implementations used to cross-check the library.

Nothing here calls the library's kernels or policy code.
"""

import itertools
import math


def utility(kind, param, age):
    if kind == "exponential":
        return math.e ** (-param * age)
    if kind == "linear":
        return max(0.0, (param - age) / param)
    return float(age <= param)


def lc_context(examples, cfg, now):
    return math.fsum(utility(cfg.utility_kind, cfg.decay_rate, now - e.created_at_s)
                     for e in examples if e.created_at_s <= now)


def _greedy_by_rescan(candidates, key, sizes, needed):
    """Pick the minimum-key survivor by a full scan each round."""
    remaining = list(candidates)
    victims, freed = [], 0
    while freed < needed:
        best = None
        for m in remaining:
            if best is None or key(m) < key(best):
                best = m
        remaining.remove(best)
        victims.append(best)
        freed += sizes[best]
    return victims


def fifo_victims(entries, needed):
    sizes = {m: e.footprint_bytes for m, e in entries.items()}
    return _greedy_by_rescan(entries, lambda m: entries[m].fifo_seq, sizes, needed)


def lfu_victims(entries, needed):
    sizes = {m: e.footprint_bytes for m, e in entries.items()}
    return _greedy_by_rescan(
        entries, lambda m: (entries[m].use_count, entries[m].last_used_s, m), sizes, needed)


def lc_victims(entries, examples_of, cfg, now, needed):
    sizes = {m: e.footprint_bytes for m, e in entries.items()}
    ctx = {m: lc_context(examples_of(m), cfg, now) for m in entries}
    return _greedy_by_rescan(entries, lambda m: (ctx[m], entries[m].last_used_s, m), sizes, needed)


def min_single_victim(contexts, sizes, needed):
    """Enumerate every single-model eviction that frees enough; pick least context."""
    feasible = [m for m in contexts if sizes[m] >= needed]
    return min(feasible, key=lambda m: contexts[m])


def is_minimal(victims, sizes, needed):
    freed = sum(sizes[v] for v in victims)
    return freed >= needed and (not victims or freed - sizes[victims[-1]] < needed)


def all_orderings_agree(victims, entries, key):
    """Every chosen victim has a key <= every model that survived its round."""
    survivors = set(entries)
    for v in victims:
        survivors.discard(v)
        if any(key(s) < key(v) for s in survivors):
            return False
    return True
