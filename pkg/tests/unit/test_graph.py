"""
Unit tests for the layered graph, the general graph and the reduction.
"""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from core.errors import DuplicateInsert, LayerMismatch, MissingDelete, SelfLoop
from modules.engines.naive import LayeredNaiveEngine
from modules.graph.counter import FourCopyCounter, GeneralReductionCounter
from modules.graph.general import GeneralGraph
from modules.graph.layered import L1, L2, L3, L4, LayeredGraph, MatrixId, Op, UpdateEvent, VertexRef, layer_name, vertex_index
from modules.graph.reduction import (
    DELETE_ORDER,
    INSERT_ORDER,
    GeneralUpdate,
    answering_copy,
    general_to_layered,
    rotate_event,
)
from modules.oracle.brute import brute_4cycles_general, brute_layered_4cycles, count_paths3, count_walks3
from modules.oracle.replay import LayeredOracleEngine
from modules.workload.generators import generate


def event(op, matrix, a, b):
    return UpdateEvent(Op(op), MatrixId[matrix], a, b)


def test_insert_and_delete_track_degrees():
    g = LayeredGraph()
    g.apply(event("+", "A", 0, 5))
    g.apply(event("+", "B", 5, 2))
    g.apply(event("+", "C", 2, 7))
    assert g.m == 3
    assert g.class_degree(L1, 0) == 1
    assert g.class_degree(L2, 5) == 2
    assert g.class_degree(L3, 2) == 2
    assert g.class_degree(L4, 7) == 1
    g.apply(event("-", "B", 5, 2))
    assert g.m == 2
    assert g.class_degree(L2, 5) == 1
    assert not g.has_edge(MatrixId.B, 5, 2)


def test_d_edges_do_not_count_towards_class_degree():
    g = LayeredGraph()
    g.apply(event("+", "D", 3, 4))
    assert g.class_degree(L1, 4) == 0
    assert g.class_degree(L4, 3) == 0
    assert g.degree(MatrixId.D, L4, 3) == 1


def test_duplicate_insert_and_missing_delete():
    g = LayeredGraph()
    g.apply(event("+", "A", 1, 1))
    with pytest.raises(DuplicateInsert):
        g.apply(event("+", "A", 1, 1))
    with pytest.raises(MissingDelete):
        g.apply(event("-", "B", 1, 1))
    assert g.m == 1


def test_vertex_refs_must_match_matrix_layers():
    e = UpdateEvent.from_refs(Op.INSERT, MatrixId.D, VertexRef(1, 2), VertexRef(4, 3))
    assert (e.a, e.b) == (3, 2)
    with pytest.raises(LayerMismatch):
        UpdateEvent.from_refs(Op.INSERT, MatrixId.A, VertexRef(1, 0), VertexRef(3, 0))
    with pytest.raises(LayerMismatch):
        VertexRef(5, 0)


def test_layer_names_share_one_format():
    assert [layer_name(layer) for layer in (L1, L2, L3, L4)] == ["L1", "L2", "L3", "L4"]
    assert str(VertexRef.at(L4, 7)) == "L4:7" == str(VertexRef(4, 7))
    with pytest.raises(LayerMismatch, match="query vertex must lie on L1, got L2:0"):
        vertex_index(VertexRef(2, 0), L1, "query vertex")


def test_mirrored_event_touches_both_orientations():
    g = LayeredGraph()
    g.apply(UpdateEvent(Op.INSERT, MatrixId.B, 1, 2, mirrored=True))
    assert g.has_edge(MatrixId.B, 1, 2) and g.has_edge(MatrixId.B, 2, 1)
    assert g.m == 2


def test_replay_is_deterministic():
    stream = generate("uniform", 6, 200, seed=3, mode="layered")
    first, second = LayeredGraph(), LayeredGraph()
    for e in stream:
        first.apply(e)
    for e in stream:
        second.apply(e)
    assert first == second
    copy = first.copy()
    copy.apply(event("+", "A", 99, 99))
    assert copy != first


def test_general_graph_rejects_self_loops():
    g = GeneralGraph()
    with pytest.raises(SelfLoop):
        g.apply(GeneralUpdate(Op.INSERT, 2, 2))
    g.apply(GeneralUpdate(Op.INSERT, 2, 3))
    assert g.degree(2) == 1 and g.degree(3) == 1
    assert list(g.edges()) == [(2, 3)]


def test_reduction_orders_and_query_index():
    events, index = general_to_layered(GeneralUpdate(Op.INSERT, 1, 2))
    assert [e.matrix for e in events] == list(INSERT_ORDER)
    assert events[index].matrix is MatrixId.D and index == 0
    assert all(e.mirrored for e in events)

    events, index = general_to_layered(GeneralUpdate(Op.DELETE, 1, 2))
    assert [e.matrix for e in events] == list(DELETE_ORDER)
    assert events[index].matrix is MatrixId.D and index == 3

    with pytest.raises(SelfLoop):
        general_to_layered(GeneralUpdate(Op.INSERT, 4, 4))


def test_rotation_maps_each_matrix_to_d_in_its_answering_copy():
    for matrix in MatrixId:
        k = answering_copy(matrix)
        rotated = rotate_event(UpdateEvent(Op.INSERT, matrix, 1, 2), k)
        assert rotated.matrix is MatrixId.D
        assert (rotated.a, rotated.b) == (1, 2)


def test_square_stream_totals(square_stream):
    counter = GeneralReductionCounter(LayeredOracleEngine)
    assert [counter.apply(u) for u in square_stream] == [0, 0, 0, 1]


def test_k4_stream_total(k4_stream):
    counter = GeneralReductionCounter(LayeredOracleEngine)
    for update in k4_stream:
        counter.apply(update)
    assert counter.total == 3


@pytest.mark.parametrize("seed", range(3))
def test_four_copy_counter_matches_layered_oracle(seed):
    counter = FourCopyCounter(LayeredNaiveEngine)
    g = LayeredGraph()
    for e in generate("uniform", 5, 150, seed=seed, mode="layered"):
        g.apply(e)
        assert counter.apply(e) == brute_layered_4cycles(g)


@pytest.mark.parametrize("seed", range(3))
def test_general_reduction_matches_general_oracle(seed):
    counter = GeneralReductionCounter(LayeredNaiveEngine)
    g = GeneralGraph()
    for update in generate("uniform", 7, 120, seed=seed):
        g.apply(update)
        assert counter.apply(update) == brute_4cycles_general(g.adj)


@st.composite
def general_graphs(draw):
    n = draw(st.integers(min_value=2, max_value=7))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs)))
    g = GeneralGraph()
    for u, v in chosen:
        g.apply(GeneralUpdate(Op.INSERT, u, v))
    return g


@given(general_graphs())
@settings(max_examples=60)
def test_walks_equal_paths_at_query_time(g):
    """With the edge (u, v) absent, every 3-walk u -> v is a path."""
    for u in list(g.adj):
        for v in list(g.adj):
            if u != v and not g.has_edge(u, v):
                assert count_walks3(g.adj, u, v) == count_paths3(g.adj, u, v)
