"""
Unit tests for the main engine: exact queries across phases, class transitions,
rebuilds and the per-method attribution.
"""

from fractions import Fraction

import numpy as np
import pytest

from core.errors import DeadlineMissed, RebuildRequired
from modules.engines.main import MainEngine, expected_bucket_sums
from modules.engines.main.handover import HandOver
from modules.engines.main.stores import ClassMap, DeltaAdjacency, PhaseView, build_catalog
from modules.engines.warmup import WarmupEngine
from modules.graph.counter import FourCopyCounter, GeneralReductionCounter
from modules.graph.layered import L2, L3, LayeredGraph, MatrixId, Op, UpdateEvent
from modules.matmul.matrix import CountMatrix
from modules.oracle.brute import brute_3paths, bucketed_3paths
from modules.oracle.replay import GeneralOracleCounter, LayeredOracleCounter
from modules.params.constraints import ParamSet
from modules.params.thresholds import Thresholds, thresholds_for
from modules.reporting.reporting import bench_row, summarize_bench
from modules.workload.generators import generate

F = Fraction
BEST = ParamSet(epsilon=F(1, 24), epsilon1=F(1, 24), epsilon2=F(5, 24), delta=F(1, 8))


def replay_checked(engine, stream, vertices):
    for e in stream:
        if e.matrix is MatrixId.D:
            assert engine.query(e.b, e.a) == brute_3paths(engine.graph, e.b, e.a)
        engine.apply(e)
    for u in range(vertices):
        for v in range(vertices):
            assert engine.query(u, v) == brute_3paths(engine.graph, u, v)


@pytest.mark.parametrize("seed", range(10))
def test_queries_match_brute_force_across_phases(seed, small_thresholds):
    engine = MainEngine(thresholds=small_thresholds)
    replay_checked(engine, generate("hub", 6, 300, seed=seed, mode="layered"), 6)
    assert engine.phase_index >= 3
    assert engine.check_stores() == []
    assert engine.metrics()["rebuilds"] == 1


@pytest.mark.parametrize("seed", range(3))
def test_stores_stay_exact_after_every_update(seed, small_thresholds):
    engine = MainEngine(thresholds=small_thresholds)
    for e in generate("hub", 6, 120, seed=seed, mode="layered"):
        engine.apply(e)
        assert engine.check_stores() == []
    assert engine.counters["transitions_completed"] > 0


@pytest.mark.parametrize("seed", range(4))
def test_four_copy_counter_matches_oracle(seed, small_thresholds):
    counter = FourCopyCounter(lambda: MainEngine(thresholds=small_thresholds))
    oracle = LayeredOracleCounter()
    for e in generate("hub", 6, 200, seed=seed, mode="layered"):
        assert counter.apply(e) == oracle.apply(e)


@pytest.mark.parametrize("seed", range(4))
def test_general_reduction_matches_oracle(seed, small_thresholds):
    counter = GeneralReductionCounter(lambda: MainEngine(thresholds=small_thresholds))
    oracle = GeneralOracleCounter()
    for update in generate("hub", 8, 150, seed=seed):
        assert counter.apply(update) == oracle.apply(update)


def test_lenient_deadlines_force_late_work_and_stay_exact():
    th = Thresholds(tiny=1, medium=2, high=4, chunk_size=4, chunk_sparse=2, phase_size=20, per_update_budget=3)
    engine = MainEngine(thresholds=th, strict_deadlines=False)
    replay_checked(engine, generate("hub", 6, 300, seed=11, mode="layered"), 6)
    assert engine.counters["deadline_misses"] > 0
    assert engine.check_stores() == []


def test_auto_policy_bootstraps_and_rebuilds():
    def source(m):
        return thresholds_for(m, BEST, bootstrap_min=7)

    engine = MainEngine(threshold_source=source, strict_deadlines=False)
    assert engine.naive is not None
    replay_checked(engine, generate("uniform", 8, 400, delete_fraction=0.2, seed=3, mode="layered"), 8)
    assert engine.naive is None
    assert engine.counters["rebuilds"] >= 2
    assert engine.check_stores() == []


def test_auto_policy_counter_matches_oracle():
    def source(m):
        return thresholds_for(m, BEST, bootstrap_min=7)

    counter = FourCopyCounter(lambda: MainEngine(threshold_source=source, strict_deadlines=False))
    oracle = LayeredOracleCounter()
    for e in generate("uniform", 6, 300, delete_fraction=0.2, seed=8, mode="layered"):
        assert counter.apply(e) == oracle.apply(e)


def test_strict_policy_raises_when_the_edge_count_drifts():
    th = Thresholds(m_hat=2, tiny=1, medium=2, high=4, chunk_size=4, chunk_sparse=2, phase_size=20, per_update_budget=100)
    engine = MainEngine(thresholds=th, rebuild_policy="strict")
    for w in range(4):
        engine.apply(UpdateEvent(Op.INSERT, MatrixId.A, 0, w))
    with pytest.raises(RebuildRequired):
        engine.apply(UpdateEvent(Op.INSERT, MatrixId.A, 0, 4))


def test_engine_needs_thresholds_or_a_source():
    with pytest.raises(ValueError):
        MainEngine()
    with pytest.raises(ValueError):
        MainEngine(thresholds=None, threshold_source=lambda m: None, rebuild_policy="sometimes")


@pytest.mark.parametrize("seed", range(3))
def test_method_contributions_match_their_buckets(seed, small_thresholds):
    engine = MainEngine(thresholds=small_thresholds)
    stream = generate("hub", 6, 250, seed=seed, mode="layered")
    for index, e in enumerate(stream):
        engine.apply(e)
        if index % 25 != 24:
            continue
        for u in range(6):
            for v in range(6):
                buckets = bucketed_3paths(
                    engine.graph,
                    engine.old,
                    lambda w: engine.classes.get(L2, w),
                    lambda x: engine.classes.get(L3, x),
                    u,
                    v,
                )
                rows = engine.query_attributed(u, v)
                for label, (value, expected) in expected_bucket_sums(rows, buckets).items():
                    assert value == expected, f"{label} at update {index} for ({u}, {v})"
                assert sum(value for _, _, value in rows) == brute_3paths(engine.graph, u, v)


def test_inverse_stream_returns_every_query_to_zero(small_thresholds):
    stream = generate("hub", 6, 200, seed=6, mode="layered")
    engine = MainEngine(thresholds=small_thresholds)
    for e in stream:
        engine.apply(e)
    for e in reversed(stream):
        engine.apply(e.inverse())
    assert engine.graph.m == 0
    assert engine.check_stores() == []
    assert all(engine.query(u, v) == 0 for u in range(6) for v in range(6))
    for warmup in engine.warmup_instances():
        assert warmup.store_snapshot() == warmup.expected_stores()


def warmup_state(warmup):
    sealed = warmup.sealed
    return {
        "current": (warmup.current.edges, warmup.current.labels2, warmup.current.labels3),
        "sealed": None if sealed is None else (sealed.edges, sealed.labels2, sealed.labels3, sealed.parts),
        "stores": warmup.store_snapshot(),
        "folded": warmup.folded_b,
        "net": warmup.net_b,
        "jobs": sorted(warmup.jobs),
    }


def test_inverse_stream_restores_the_state_of_a_fresh_engine(small_thresholds):
    stream = generate("hub", 6, 200, seed=6, mode="layered")
    engine = MainEngine(thresholds=small_thresholds)
    for e in stream:
        engine.apply(e)
    for e in reversed(stream):
        engine.apply(e.inverse())
    assert engine.classes.classes == [{}, {}, {}, {}]
    assert not engine.transitions
    # an isolated A edge adds no paths; toggling it moves both snapshots past the stream
    phase = engine.phase_index
    while engine.phase_index < phase + 3:
        engine.apply(UpdateEvent(Op.INSERT, MatrixId.A, 0, 0))
        engine.apply(UpdateEvent(Op.DELETE, MatrixId.A, 0, 0))

    fresh = MainEngine(thresholds=small_thresholds)
    assert engine.classes.classes == fresh.classes.classes
    assert engine.dense == fresh.dense
    for name in engine.catalog:
        assert engine.stores[name] == fresh.stores[name], name
    for name in engine.next_names:
        assert engine.next_stores[name] == fresh.next_stores[name], name
    for views in ("warmups", "next_warmups"):
        for route, warmup in getattr(engine, views).items():
            assert warmup_state(warmup) == warmup_state(getattr(fresh, views)[route]), (views, route)
    assert engine.check_stores() == []


def peak_edges(stream):
    g = LayeredGraph()
    peak = 0
    for e in stream:
        g.apply(e)
        peak = max(peak, g.m)
    return peak


@pytest.mark.parametrize("kind", ["hub", "uniform"])
@pytest.mark.parametrize("seed", range(10))
def test_derived_budgets_meet_every_deadline(kind, seed):
    stream = generate(kind, 12, 1000, delete_fraction=0.45, seed=seed, mode="layered")
    engine = MainEngine(thresholds=thresholds_for(peak_edges(stream), BEST))
    engine.take_stats()
    rows = []
    for index, e in enumerate(stream):
        if e.matrix is MatrixId.D:
            assert engine.query(e.b, e.a) == brute_3paths(engine.graph, e.b, e.a)
        engine.apply(e)
        rows.append(bench_row(index, 0, engine.take_stats()))
    assert engine.phase_index >= 3
    assert engine.counters["deadline_misses"] == 0
    summary = summarize_bench(rows)
    assert summary["over_budget"] == 0
    assert summary["rebuilds"] == 0
    assert engine.counters["boundary_ops"] > 0


def sliced_thresholds():
    return Thresholds(tiny=1, medium=2, high=4, chunk_size=4, chunk_sparse=2, phase_size=40, per_update_budget=400)


@pytest.mark.parametrize("seed", range(3))
def test_hand_over_runs_in_budgeted_slices_while_queries_stay_exact(seed):
    engine = MainEngine(thresholds=sliced_thresholds(), transition_slack=16)
    engine.take_stats()
    open_updates = 0
    for e in generate("hub", 8, 600, seed=seed, mode="layered"):
        if engine.handover is not None:
            open_updates += 1
            for u in range(8):
                assert engine.query(u, e.b) == brute_3paths(engine.graph, u, e.b)
            assert engine.check_stores() == []
        engine.apply(e)
        stats = engine.take_stats()
        assert stats.slice_ops <= stats.budget
        assert not stats.rebuild
    assert open_updates > 0
    assert engine.phase_index >= 3
    assert engine.counters["boundary_ops"] > 0
    assert engine.check_stores() == []


def test_warmup_work_is_counted_in_the_update_that_does_it(small_thresholds, monkeypatch):
    taken = []
    original = WarmupEngine.take_stats

    def recording(self):
        stats = original(self)
        taken.append(stats.ops)
        return stats

    monkeypatch.setattr(WarmupEngine, "take_stats", recording)
    engine = MainEngine(thresholds=small_thresholds)
    warmup_ops = 0
    for e in generate("hub", 6, 250, seed=3, mode="layered"):
        taken.clear()
        engine.apply(e)
        stats = engine.take_stats()
        assert stats.ops >= sum(taken)
        warmup_ops += sum(taken)
        assert all(original(w).ops == 0 for w in engine.warmup_instances())
    assert warmup_ops > 0
    assert engine.counters["transitions_completed"] > 0


def product_table():
    return CountMatrix([0, 1, 2], [0, 1, 2], np.arange(1, 10, dtype=np.int64).reshape(3, 3))


def empty_handover(deadline):
    g = LayeredGraph()
    view = PhaseView(g, g, DeltaAdjacency())
    return HandOver({"old_ab_SS": product_table()}, build_catalog(), ClassMap(), [], view, ClassMap(), [], deadline)


def test_hand_over_installs_products_entry_by_entry():
    handover = empty_handover(deadline=10)
    slices = []
    while not handover.done:
        used, forced = handover.tick(4, strict=True)
        assert not forced
        slices.append(used)
    assert slices == [4, 4, 1]
    assert handover.tables["old_ab_SS"] == product_table().to_pair_count()


def test_late_hand_over_raises_or_is_forced():
    strict = empty_handover(deadline=3)
    strict.tick(1, strict=True)
    strict.tick(1, strict=True)
    with pytest.raises(DeadlineMissed):
        strict.tick(1, strict=True)

    lenient = empty_handover(deadline=3)
    lenient.tick(1, strict=False)
    lenient.tick(1, strict=False)
    used, forced = lenient.tick(1, strict=False)
    assert forced and used == 7
    assert lenient.done
    assert lenient.tables["old_ab_SS"] == product_table().to_pair_count()
