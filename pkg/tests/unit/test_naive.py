"""
Unit tests for the naive engines.
"""

import pytest

from modules.engines.naive import LayeredNaiveEngine, NaiveCycleCounter
from modules.graph.general import GeneralGraph
from modules.graph.layered import LayeredGraph, MatrixId, Op, UpdateEvent
from modules.graph.reduction import GeneralUpdate
from modules.oracle.brute import brute_3paths, brute_4cycles_general
from modules.reporting.reporting import bench_row, summarize_bench
from modules.workload.generators import generate


def test_square_and_k4(square_stream, k4_stream):
    counter = NaiveCycleCounter()
    assert [counter.apply(u) for u in square_stream] == [0, 0, 0, 1]
    counter = NaiveCycleCounter()
    for update in k4_stream:
        counter.apply(update)
    assert counter.total == 3


@pytest.mark.parametrize("seed", range(10))
def test_matches_oracle_on_seeded_streams(seed):
    counter = NaiveCycleCounter()
    g = GeneralGraph()
    for index, update in enumerate(generate("uniform", 30, 1000, delete_fraction=0.3, seed=seed)):
        g.apply(update)
        total = counter.apply(update)
        # full recounts at checkpoints only
        if index % 100 == 99:
            assert total == brute_4cycles_general(g.adj)


def test_inverse_stream_restores_the_empty_state():
    stream = generate("hub", 12, 300, seed=4)
    counter = NaiveCycleCounter()
    for update in stream:
        counter.apply(update)
    for update in reversed(stream):
        counter.apply(update.inverse())
    assert counter.total == 0
    assert len(counter.wedges) == 0
    assert counter.graph.m == 0


def test_ops_per_update_are_bounded_by_degrees():
    counter = NaiveCycleCounter()
    n = 20
    for update in generate("uniform", n, 400, seed=1):
        counter.apply(update)
        stats = counter.take_stats()
        assert stats.ops <= 3 * (n - 1)
        assert stats.job_backlog == 0 and not stats.rebuild


def test_bench_ops_follow_the_degree_formula():
    counter = NaiveCycleCounter()
    mirror = GeneralGraph()
    rows = []
    for index, update in enumerate(generate("hub", 16, 400, seed=7)):
        if update.op is Op.DELETE:
            mirror.apply(update)
        expected = 2 * mirror.degree(update.u) + mirror.degree(update.v)
        if update.op is Op.INSERT:
            mirror.apply(update)
        counter.apply(update)
        row = bench_row(index, 0, counter.take_stats())
        assert row["elementary_ops"] == expected
        rows.append(row)
    summary = summarize_bench(rows)
    assert summary["updates"] == 400
    assert summary["over_budget"] == 0 and summary["max_slice_ops"] == 0


def test_layered_engine_answers_three_path_queries():
    engine = LayeredNaiveEngine()
    g = LayeredGraph()
    for e in generate("uniform", 6, 300, seed=2, mode="layered"):
        engine.apply(e)
        g.apply(e)
        for u in range(6):
            assert engine.query(u, e.b % 6) == brute_3paths(g, u, e.b % 6)


def test_layered_engine_absorbs_events_on_a_shared_graph(canon_graph):
    engine = LayeredNaiveEngine(graph=canon_graph)
    assert engine.query(0, 0) == 2
    event = UpdateEvent(Op.INSERT, MatrixId.C, 1, 0)
    canon_graph.apply(event)
    engine.absorb(event)
    assert engine.query(0, 0) == brute_3paths(canon_graph, 0, 0) == 3
    assert engine.metrics()["engine"] == "naive-layered"
