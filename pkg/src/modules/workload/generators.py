"""
Seeded synthetic update streams.

Kinds:
- uniform: random inserts and deletes over a fixed vertex set
- hub: like uniform, but half the inserts touch a hub vertex, driving it through the
  degree classes
- sliding-window: every insert is deleted `window` steps later; the tail is drained so
  the final graph is empty

Layered streams draw the matrix uniformly from A..D; with frozen_prefix the A and C
edges are generated first and only B and D change afterwards.
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from core.errors import InvalidParam
from modules.graph.general import GeneralGraph
from modules.graph.layered import LayeredGraph, MatrixId, Op, UpdateEvent
from modules.graph.reduction import GeneralUpdate

logger = logging.getLogger(__name__)

KINDS = ("uniform", "hub", "sliding-window")

Edge = Tuple[int, ...]
Update = Union[GeneralUpdate, UpdateEvent]


class EdgePool:
    """Present edges with O(1) random removal."""

    def __init__(self):
        self.items: List[Edge] = []
        self.index: Dict[Edge, int] = {}

    def __contains__(self, edge: Edge) -> bool:
        return edge in self.index

    def __len__(self) -> int:
        return len(self.items)

    def add(self, edge: Edge) -> None:
        self.index[edge] = len(self.items)
        self.items.append(edge)

    def remove(self, edge: Edge) -> None:
        i = self.index.pop(edge)
        last = self.items.pop()
        if i < len(self.items):
            self.items[i] = last
            self.index[last] = i

    def pick(self, rng: np.random.Generator) -> Edge:
        return self.items[int(rng.integers(len(self.items)))]


class _Sampler:
    """Draws candidate edges for one stream shape."""

    def __init__(self, rng: np.random.Generator, vertices: int, mode: str, matrices: Sequence[MatrixId], hub: bool):
        self.rng = rng
        self.n = vertices
        self.mode = mode
        self.matrices = list(matrices)
        self.hub = hub

    def draw(self) -> Edge:
        rng, n = self.rng, self.n
        if self.mode == "general":
            u = 0 if self.hub and rng.random() < 0.5 else int(rng.integers(n))
            v = int(rng.integers(n))
            return (min(u, v), max(u, v))
        matrix = self.matrices[int(rng.integers(len(self.matrices)))]
        a, b = int(rng.integers(n)), int(rng.integers(n))
        if self.hub and rng.random() < 0.5:
            # vertex 0 of every layer acts as the hub
            if rng.random() < 0.5:
                a = 0
            else:
                b = 0
        return (int(matrix), a, b)

    def valid(self, edge: Edge) -> bool:
        return self.mode != "general" or edge[0] != edge[1]


def _update(mode: str, op: Op, edge: Edge) -> Update:
    if mode == "general":
        return GeneralUpdate(op, edge[0], edge[1])
    return UpdateEvent(op, MatrixId(edge[0]), edge[1], edge[2])


def _capacity(mode: str, vertices: int, matrices: int) -> int:
    if mode == "general":
        return vertices * (vertices - 1) // 2
    return matrices * vertices * vertices


def _insert(sampler: _Sampler, pool: EdgePool, attempts: int = 64) -> Optional[Edge]:
    for _ in range(attempts):
        edge = sampler.draw()
        if sampler.valid(edge) and edge not in pool:
            return edge
    return None


def generate(
    kind: str,
    vertices: int,
    steps: int,
    delete_fraction: float = 0.3,
    seed: int = 0,
    mode: str = "general",
    window: int = 16,
    frozen_prefix: int = 0,
) -> List[Update]:
    """
    Generate a valid update stream.

    Args:
        kind: uniform, hub or sliding-window
        vertices: Vertices in the general graph, or per layer in layered mode
        steps: Number of generated steps (sliding-window adds its drain on top)
        delete_fraction: Probability that a step deletes an edge
        seed: Random seed; equal arguments give equal streams
        mode: general or layered
        window: Edge lifetime for sliding-window
        frozen_prefix: Layered only; number of A/C inserts emitted before any B/D update

    Returns:
        list: Updates that never insert a present edge or delete an absent one

    Raises:
        InvalidParam: On out-of-range arguments
    """
    if kind not in KINDS:
        raise InvalidParam(f"Unknown workload kind {kind!r}, expected one of {KINDS}")
    if mode not in ("general", "layered"):
        raise InvalidParam(f"Unknown stream mode {mode!r}")
    if vertices < (2 if mode == "general" else 1):
        raise InvalidParam(f"Need at least {2 if mode == 'general' else 1} vertices, got {vertices}")
    if steps < 0:
        raise InvalidParam(f"Steps must be non-negative, got {steps}")
    if not 0 <= delete_fraction < 1:
        raise InvalidParam(f"Delete fraction must be in [0, 1), got {delete_fraction}")
    if window < 1:
        raise InvalidParam(f"Window must be positive, got {window}")
    if frozen_prefix and mode != "layered":
        raise InvalidParam("A frozen prefix only applies to layered streams")

    rng = np.random.default_rng(seed)
    hub = kind == "hub"
    updates: List[Update] = []
    pool = EdgePool()

    if frozen_prefix:
        prefix_sampler = _Sampler(rng, vertices, mode, (MatrixId.A, MatrixId.C), hub)
        for _ in range(frozen_prefix):
            edge = _insert(prefix_sampler, pool)
            if edge is None:
                break
            pool.add(edge)
            updates.append(_update(mode, Op.INSERT, edge))
        matrices = (MatrixId.B, MatrixId.D)
    else:
        matrices = tuple(MatrixId)

    sampler = _Sampler(rng, vertices, mode, matrices, hub)
    # only edges of the dynamic matrices may be deleted
    dynamic = EdgePool()
    capacity = _capacity(mode, vertices, len(matrices))

    if kind == "sliding-window":
        live: List[Edge] = []
        for _ in range(steps):
            if len(live) >= window or len(dynamic) >= capacity:
                edge = live.pop(0)
                dynamic.remove(edge)
                updates.append(_update(mode, Op.DELETE, edge))
                continue
            edge = _insert(sampler, dynamic)
            if edge is None:
                continue
            dynamic.add(edge)
            live.append(edge)
            updates.append(_update(mode, Op.INSERT, edge))
        for edge in live:
            updates.append(_update(mode, Op.DELETE, edge))
        logger.info(f"Generated sliding-window stream with {len(updates)} updates")
        return updates

    for _ in range(steps):
        delete = len(dynamic) > 0 and (rng.random() < delete_fraction or len(dynamic) >= capacity)
        edge = None if delete else _insert(sampler, dynamic)
        if edge is None:
            if not len(dynamic):
                continue
            edge = dynamic.pick(rng)
            dynamic.remove(edge)
            updates.append(_update(mode, Op.DELETE, edge))
        else:
            dynamic.add(edge)
            updates.append(_update(mode, Op.INSERT, edge))
    logger.info(f"Generated {kind} {mode} stream with {len(updates)} updates (seed={seed})")
    return updates


def validate_stream(updates: Sequence[Update], mode: str) -> Union[GeneralGraph, LayeredGraph]:
    """
    Replay a stream on an empty graph.

    Returns:
        The final graph

    Raises:
        DuplicateInsert, MissingDelete, SelfLoop: On the first invalid update
    """
    graph = GeneralGraph() if mode == "general" else LayeredGraph()
    for update in updates:
        graph.apply(update)
    return graph


def degree_trace(updates: Sequence[Update], vertex: int = 0) -> List[int]:
    """Degree of a general-graph vertex after every update."""
    graph = GeneralGraph()
    trace = []
    for update in updates:
        graph.apply(update)
        trace.append(graph.degree(vertex))
    return trace

