"""
Unit tests for the brute-force oracles.
"""

import pytest

from core.errors import LayerMismatch
from modules.graph.layered import LayeredGraph, MatrixId, Op, UpdateEvent, VertexRef
from modules.oracle.brute import (
    brute_2paths,
    brute_3paths,
    brute_4cycles_general,
    brute_layered_4cycles,
    bucketed_3paths,
    join_example_graph,
    join_size,
)
from modules.oracle.replay import GeneralOracleCounter, LayeredOracleCounter
from modules.graph.reduction import GeneralUpdate


def test_general_cycles_on_small_graphs():
    square = {0: {1, 3}, 1: {0, 2}, 2: {1, 3}, 3: {0, 2}}
    assert brute_4cycles_general(square) == 1
    k4 = {u: {v for v in range(4) if v != u} for u in range(4)}
    assert brute_4cycles_general(k4) == 3
    k5 = {u: {v for v in range(5) if v != u} for u in range(5)}
    assert brute_4cycles_general(k5) == 15
    assert brute_4cycles_general({}) == 0


def test_join_example():
    g = join_example_graph()
    assert brute_2paths(g, 1, 1) == 3
    assert join_size(g) == 6
    assert brute_2paths(g, 2, 3) == 0


def test_canon_paths(canon_graph):
    assert brute_3paths(canon_graph, 0, 0) == 2
    assert brute_3paths(canon_graph, VertexRef(1, 0), VertexRef(4, 0)) == 2
    assert brute_3paths(canon_graph, 1, 0) == 0


def test_query_vertices_must_lie_on_the_right_layers(canon_graph):
    with pytest.raises(LayerMismatch):
        brute_3paths(canon_graph, VertexRef(2, 0), VertexRef(4, 0))
    with pytest.raises(LayerMismatch):
        brute_2paths(canon_graph, VertexRef(1, 0), VertexRef(4, 0))


def test_layered_cycle_closes_canon_paths(canon_graph):
    assert brute_layered_4cycles(canon_graph) == 0
    canon_graph.apply(UpdateEvent(Op.INSERT, MatrixId.D, 0, 0))
    assert brute_layered_4cycles(canon_graph) == 2


def test_bucketed_counts_sum_to_current_paths(canon_graph):
    old = canon_graph.copy()
    canon_graph.apply(UpdateEvent(Op.DELETE, MatrixId.B, 0, 0))
    canon_graph.apply(UpdateEvent(Op.INSERT, MatrixId.A, 0, 2))
    canon_graph.apply(UpdateEvent(Op.INSERT, MatrixId.B, 2, 0))
    classes = {1: "D"}
    buckets = bucketed_3paths(canon_graph, old, lambda w: classes.get(w, "T"), lambda x: "S", 0, 0)
    assert sum(buckets.values()) == brute_3paths(canon_graph, 0, 0) == 2
    # the deleted old path cancels between its all-old and new-B buckets
    assert buckets[("T", "S", "o", "o", "o")] == 1
    assert buckets[("T", "S", "o", "n", "o")] == -1
    assert buckets[("D", "S", "o", "o", "o")] == 1
    assert buckets[("T", "S", "n", "n", "o")] == 1


def test_oracle_counters_follow_updates(k4_stream):
    counter = GeneralOracleCounter()
    totals = [counter.apply(u) for u in k4_stream]
    assert totals[-1] == 3
    counter.apply(GeneralUpdate(Op.DELETE, 0, 1))
    assert counter.total == 1

    layered = LayeredOracleCounter()
    layered.apply(UpdateEvent(Op.INSERT, MatrixId.A, 0, 0))
    layered.apply(UpdateEvent(Op.INSERT, MatrixId.B, 0, 0))
    layered.apply(UpdateEvent(Op.INSERT, MatrixId.C, 0, 0))
    assert layered.apply(UpdateEvent(Op.INSERT, MatrixId.D, 0, 0)) == 1
    assert isinstance(layered.graph, LayeredGraph)
