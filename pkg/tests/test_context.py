import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edgeserve_sim.context import (AoCConfig, ContextStore, DemonstrationExample, age_utility,
                                   effective_context, record_example)
from edgeserve_sim.errors import ConfigError, TimeError

EXP = AoCConfig("exponential", 0.1)


@pytest.mark.parametrize("cfg", [AoCConfig("exponential", 0.1), AoCConfig("linear", 30.0),
                                 AoCConfig("step", 5.0)])
def test_utility_at_zero_age(cfg, kernel_backend):
    assert age_utility(cfg, 0.0) == 1.0


def test_exponential_utility(kernel_backend):
    # Independent reference: 1/e.
    assert age_utility(EXP, 10.0) == pytest.approx(1 / 2.718281828459045, rel=1e-12)
    assert age_utility(EXP, 10.0) == pytest.approx(0.367879, abs=1e-6)


def test_step_boundary(kernel_backend):
    cfg = AoCConfig("step", 5.0)
    assert age_utility(cfg, 5.0) == 1.0
    assert age_utility(cfg, 5.0001) == 0.0


def test_linear_reaches_zero(kernel_backend):
    cfg = AoCConfig("linear", 20.0)
    assert age_utility(cfg, 10.0) == 0.5
    assert age_utility(cfg, 20.0) == 0.0
    assert age_utility(cfg, 40.0) == 0.0


@settings(max_examples=200, deadline=None)
@given(kind=st.sampled_from(["exponential", "linear", "step"]), param=st.floats(1e-3, 1e3),
       a1=st.floats(0, 1e4), a2=st.floats(0, 1e4))
def test_utility_properties(kind, param, a1, a2):
    cfg = AoCConfig(kind, param)
    lo, hi = sorted((a1, a2))
    assert age_utility(cfg, 0.0) == 1.0
    assert 0.0 <= age_utility(cfg, hi) <= age_utility(cfg, lo) <= 1.0


def test_capacity_drops_oldest():
    store = ContextStore(AoCConfig(store_capacity=2))
    for t in (1, 2, 3):
        record_example(store, "m", "t", t)
    assert store.examples("m") == [DemonstrationExample(2, "t"), DemonstrationExample(3, "t")]


def test_capacity_compaction_keeps_order():
    store = ContextStore(AoCConfig(store_capacity=3))
    for t in range(20):
        store.record("m", "t", float(t))
    assert [e.created_at_s for e in store.examples("m")] == [17.0, 18.0, 19.0]


def test_time_regression_rejected():
    store = ContextStore()
    store.record("m", "t", 2.0)
    with pytest.raises(TimeError):
        store.record("m", "t", 1.0)


def test_store_independent_of_residency():
    # Any model id may be recorded; residency is not consulted.
    store = ContextStore()
    store.record("never-cached", "t", 0.0)
    assert store.count("never-cached") == 1


def test_empty_store(kernel_backend):
    assert effective_context(ContextStore(EXP), "m", "t", EXP, 10.0) == 0.0


def test_two_examples_sum(kernel_backend):
    store = ContextStore(EXP)
    store.record("m", "a", 0.0)
    store.record("m", "a", 10.0)
    expected = age_utility(EXP, 10.0) + age_utility(EXP, 0.0)
    assert effective_context(store, "m", "a", EXP, 10.0) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(1.367879, abs=1e-6)


def test_cross_task_zero_relevance(kernel_backend):
    store = ContextStore(EXP)
    store.record("m", "a", 0.0)
    assert store.effective("m", "b", 0.0) == 0.0
    assert store.effective("m", None, 0.0) == 1.0


def test_relevance_matrix(kernel_backend):
    cfg = AoCConfig("step", 100.0, relevance={"a": {"b": 0.25}})
    store = ContextStore(cfg)
    store.record("m", "a", 0.0)
    store.record("m", "b", 1.0)
    assert store.effective("m", "b", 2.0) == pytest.approx(1.25)
    assert store.effective("m", "a", 2.0) == pytest.approx(1.25)


def test_relevance_validation():
    with pytest.raises(ConfigError, match="symmetric"):
        AoCConfig(relevance={"a": {"b": 0.2}, "b": {"a": 0.3}})
    with pytest.raises(ConfigError):
        AoCConfig(relevance={"a": {"b": 1.5}})
    with pytest.raises(ConfigError):
        AoCConfig(utility_kind="cubic")


def test_future_examples_excluded(kernel_backend):
    store = ContextStore(AoCConfig("step", 100.0))
    store.record("m", "a", 5.0)
    assert store.effective("m", "a", 4.0) == 0.0
    assert store.effective("m", "a", 5.0) == 1.0


example_times = st.lists(st.floats(0, 500), min_size=0, max_size=60).map(sorted)
configs = st.builds(AoCConfig, st.sampled_from(["exponential", "linear", "step"]),
                    st.floats(1e-3, 100))


@settings(max_examples=200, deadline=None)
@given(cfg=configs, times=example_times, dt=st.floats(0, 1000))
def test_staleness_and_bound(cfg, times, dt):
    store = ContextStore(cfg)
    for t in times:
        store.record("m", "a", t)
    now = (times[-1] if times else 0.0)
    before = store.effective("m", "a", now)
    after = store.effective("m", "a", now + dt)
    assert after <= before + 1e-12
    assert 0.0 <= before <= store.count("m") + 1e-9


@settings(max_examples=200, deadline=None)
@given(cfg=configs, times=example_times, split=st.integers(0, 60), extra=st.floats(0, 100))
def test_additivity(cfg, times, split, extra):
    left, right = times[:split], times[split:]
    whole, a, b = ContextStore(cfg), ContextStore(cfg), ContextStore(cfg)
    for t in times:
        whole.record("m", "x", t)
    for t in left:
        a.record("m", "x", t)
    for t in right:
        b.record("m", "x", t)
    now = (times[-1] if times else 0.0) + extra
    assert whole.effective("m", "x", now) == pytest.approx(
        a.effective("m", "x", now) + b.effective("m", "x", now), rel=1e-9, abs=1e-12)
