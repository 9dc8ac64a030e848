"""
Brute-force counting oracles.

Pure functions over read-only graphs. They enumerate definitions directly and are
used as the correctness reference for every engine.
"""

from itertools import product
from typing import Callable, Dict, Mapping, Set, Tuple, Union

from modules.graph.layered import L1, L3, L4, LayeredGraph, MatrixId, Op, UpdateEvent, VertexRef, vertex_index

A, B, C, D = MatrixId.A, MatrixId.B, MatrixId.C, MatrixId.D

Vertex = Union[int, VertexRef]
BucketKey = Tuple[str, str, str, str, str]


def brute_4cycles_general(adj: Mapping[int, Set[int]]) -> int:
    """
    Count 4-cycle subgraphs of a simple undirected graph.

    A cycle a-b-c-d is enumerated only from its minimum vertex a and with b < d, so
    each subgraph is counted once.
    """
    count = 0
    for a, a_nbrs in adj.items():
        for b in a_nbrs:
            if b <= a:
                continue
            for c in adj.get(b, ()):
                if c <= a:
                    continue
                for d in adj.get(c, ()):
                    if d <= b or d == c:
                        continue
                    if d in a_nbrs:
                        count += 1
    return count


def brute_layered_4cycles(g: LayeredGraph) -> int:
    """Count tuples (v1, v2, v3, v4), vi in Li, with all four edges present."""
    count = 0
    for v1, l2 in g.fwd[A].items():
        for v2 in l2:
            for v3 in g.out(B, v2):
                for v4 in g.out(C, v3):
                    if g.has_edge(D, v4, v1):
                        count += 1
    return count


def brute_3paths(g: LayeredGraph, u: Vertex, v: Vertex) -> int:
    """
    Count (w2, w3) with A(u, w2), B(w2, w3) and C(w3, v).

    Raises:
        LayerMismatch: If u is not on L1 or v not on L4
    """
    u = vertex_index(u, L1, "3-path start")
    v = vertex_index(v, L4, "3-path end")
    count = 0
    ends = g.inc(C, v)
    for w2 in g.out(A, u):
        for w3 in g.out(B, w2):
            if w3 in ends:
                count += 1
    return count


def brute_2paths(g: LayeredGraph, x: Vertex, y: Vertex) -> int:
    """
    Count w with A(x, w) and B(w, y).

    Raises:
        LayerMismatch: If x is not on L1 or y not on L3
    """
    x = vertex_index(x, L1, "2-path start")
    y = vertex_index(y, L3, "2-path end")
    return len(g.out(A, x) & g.inc(B, y))


def join_size(g: LayeredGraph) -> int:
    """Number of 2-paths L1 -> L3, the size of the join of A and B."""
    return sum(len(g.out(B, w)) for targets in g.fwd[A].values() for w in targets)


def count_walks3(adj: Mapping[int, Set[int]], u: int, v: int) -> int:
    """Number of length-3 walks u -> v, vertices may repeat."""
    count = 0
    for w in adj.get(u, ()):
        for x in adj.get(w, ()):
            if v in adj.get(x, ()):
                count += 1
    return count


def count_paths3(adj: Mapping[int, Set[int]], u: int, v: int) -> int:
    """Number of length-3 paths u -> v on four distinct vertices."""
    count = 0
    for w in adj.get(u, ()):
        if w == v:
            continue
        for x in adj.get(w, ()):
            if x in (u, v):
                continue
            if v in adj.get(x, ()):
                count += 1
    return count


def _slice(cur: LayeredGraph, old: LayeredGraph, matrix: int, a: int, b: int, phase: str) -> int:
    in_old = 1 if old.has_edge(matrix, a, b) else 0
    if phase == "o":
        return in_old
    return (1 if cur.has_edge(matrix, a, b) else 0) - in_old


def bucketed_3paths(
    cur: LayeredGraph,
    old: LayeredGraph,
    class2: Callable[[int], str],
    class3: Callable[[int], str],
    u: int,
    v: int,
) -> Dict[BucketKey, int]:
    """
    Signed 3-path counts u -> v split by fine bucket.

    A bucket key is (class of w, class of x, phase of the A edge, phase of the B edge,
    phase of the C edge). Phase "o" is the old snapshot, phase "n" the current graph
    minus the old snapshot, so the buckets of one path sum to its current weight.
    """
    buckets: Dict[BucketKey, int] = {}
    ws = cur.out(A, u) | old.out(A, u)
    for w in ws:
        xs = cur.out(B, w) | old.out(B, w)
        for x in xs:
            if not (cur.has_edge(C, x, v) or old.has_edge(C, x, v)):
                continue
            for pa, pb, pc in product("on", repeat=3):
                weight = (
                    _slice(cur, old, A, u, w, pa)
                    * _slice(cur, old, B, w, x, pb)
                    * _slice(cur, old, C, x, v, pc)
                )
                if weight:
                    key = (class2(w), class3(x), pa, pb, pc)
                    buckets[key] = buckets.get(key, 0) + weight
    return buckets


def join_example_graph() -> LayeredGraph:
    """The two-relation join example: A and B with six joined pairs."""
    g = LayeredGraph()
    for a, b in [(1, 1), (1, 2), (1, 3), (2, 2), (3, 2)]:
        g.apply(UpdateEvent(Op.INSERT, A, a, b))
    for a, b in [(1, 1), (2, 1), (3, 1), (3, 3)]:
        g.apply(UpdateEvent(Op.INSERT, B, a, b))
    return g
