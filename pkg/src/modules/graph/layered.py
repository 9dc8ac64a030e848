"""
Layered graph model for the fourcycle engines.

Four vertex layers L1..L4 (0-based 0..3 internally) joined by the biadjacency
matrices A (L1-L2), B (L2-L3), C (L3-L4) and D (L4-L1). Matrix i joins layer i and
layer (i + 1) mod 4 and every edge is stored as (a, b) with a on layer i.
"""

import logging
from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Dict, Iterator, List, Set, Tuple, Union

from core.errors import DuplicateInsert, LayerMismatch, MissingDelete

logger = logging.getLogger(__name__)

L1, L2, L3, L4 = 0, 1, 2, 3
LAYERS = (L1, L2, L3, L4)


class MatrixId(IntEnum):
    """Biadjacency matrix between consecutive layers."""

    A = 0
    B = 1
    C = 2
    D = 3

    @property
    def layers(self) -> Tuple[int, int]:
        """Layers of the first and second endpoint."""
        return int(self), (int(self) + 1) % 4

    def rotated(self, k: int) -> "MatrixId":
        """Rotation by k steps: A -> B -> C -> D -> A."""
        return MatrixId((int(self) + k) % 4)


class Op(str, Enum):
    """Update operation."""

    INSERT = "+"
    DELETE = "-"

    @property
    def sign(self) -> int:
        return 1 if self is Op.INSERT else -1

    def inverse(self) -> "Op":
        return Op.DELETE if self is Op.INSERT else Op.INSERT


def layer_name(layer0: int) -> str:
    """User-facing name of a 0-based layer."""
    return f"L{layer0 + 1}"


@dataclass(frozen=True)
class VertexRef:
    """A vertex: 1-based layer number and 0-based index within the layer."""

    layer: int
    index: int

    def __post_init__(self):
        if self.layer not in (1, 2, 3, 4):
            raise LayerMismatch(f"Layer must be 1..4, got {self.layer}")
        if self.index < 0:
            raise LayerMismatch(f"Vertex index must be non-negative, got {self.index}")

    @classmethod
    def at(cls, layer0: int, index: int) -> "VertexRef":
        """Reference from a 0-based layer."""
        return cls(layer0 + 1, index)

    @property
    def layer0(self) -> int:
        return self.layer - 1

    def __str__(self) -> str:
        return f"{layer_name(self.layer0)}:{self.index}"


def vertex_index(vertex: Union[int, VertexRef], layer: int, role: str) -> int:
    """
    Index of a query vertex that must lie on a given 0-based layer.

    Raises:
        LayerMismatch: If a VertexRef names another layer or the index is negative
    """
    if isinstance(vertex, VertexRef):
        if vertex.layer0 != layer:
            raise LayerMismatch(f"{role} must lie on {layer_name(layer)}, got {vertex}")
        return vertex.index
    if vertex < 0:
        raise LayerMismatch(f"{role} index must be non-negative, got {vertex}")
    return vertex


@dataclass(frozen=True)
class UpdateEvent:
    """
    One layered update.

    A mirrored event touches (a, b) and (b, a) together; the general-graph reduction
    uses it because the replicated matrices are symmetric.
    """

    op: Op
    matrix: MatrixId
    a: int
    b: int
    mirrored: bool = False

    @classmethod
    def from_refs(cls, op: Op, matrix: MatrixId, first: VertexRef, second: VertexRef) -> "UpdateEvent":
        """
        Build an event from vertex references in either order.

        Raises:
            LayerMismatch: If the layers are not the two layers the matrix joins
        """
        left, right = matrix.layers
        if (first.layer0, second.layer0) == (left, right):
            return cls(op, matrix, first.index, second.index)
        if (second.layer0, first.layer0) == (left, right):
            return cls(op, matrix, second.index, first.index)
        raise LayerMismatch(f"{first} and {second} are not joined by matrix {matrix.name}")

    @property
    def sign(self) -> int:
        return self.op.sign

    def pairs(self) -> List[Tuple[int, int]]:
        """Stored (a, b) pairs touched by the event."""
        if self.mirrored and self.a != self.b:
            return [(self.a, self.b), (self.b, self.a)]
        return [(self.a, self.b)]

    def inverse(self) -> "UpdateEvent":
        return UpdateEvent(self.op.inverse(), self.matrix, self.a, self.b, self.mirrored)

    def __str__(self) -> str:
        suffix = " (mirrored)" if self.mirrored else ""
        return f"{self.op.value} {self.matrix.name} {self.a} {self.b}{suffix}"


class LayeredGraph:
    """
    Edge sets and degree bookkeeping for a 4-layered graph.

    Forward adjacency maps a first endpoint to its second endpoints, backward the
    reverse; empty entries are removed so iteration only sees live vertices.
    """

    def __init__(self):
        self.fwd: List[Dict[int, Set[int]]] = [{} for _ in range(4)]
        self.bwd: List[Dict[int, Set[int]]] = [{} for _ in range(4)]
        self.combined: List[Dict[int, int]] = [{} for _ in range(4)]
        self.capacity: List[int] = [0, 0, 0, 0]
        self.m = 0

    # Queries

    def has_edge(self, matrix: int, a: int, b: int) -> bool:
        return b in self.fwd[matrix].get(a, ())

    def out(self, matrix: int, a: int) -> Set[int]:
        """Second endpoints adjacent to a in the matrix."""
        return self.fwd[matrix].get(a, set())

    def inc(self, matrix: int, b: int) -> Set[int]:
        """First endpoints adjacent to b in the matrix."""
        return self.bwd[matrix].get(b, set())

    def edge_count(self, matrix: int) -> int:
        return sum(len(targets) for targets in self.fwd[matrix].values())

    def edges(self, matrix: int) -> Iterator[Tuple[int, int]]:
        for a, targets in self.fwd[matrix].items():
            for b in targets:
                yield a, b

    def degree(self, matrix: int, layer: int, v: int) -> int:
        """Degree of v in one matrix, v lying on the given layer."""
        left, right = MatrixId(matrix).layers
        if layer == left:
            return len(self.fwd[matrix].get(v, ()))
        if layer == right:
            return len(self.bwd[matrix].get(v, ()))
        raise LayerMismatch(f"Matrix {MatrixId(matrix).name} does not touch layer {layer_name(layer)}")

    def class_degree(self, layer: int, v: int) -> int:
        """Degree that decides the class: A for L1, C for L4, combined for L2/L3."""
        if layer == L1:
            return len(self.fwd[MatrixId.A].get(v, ()))
        if layer == L4:
            return len(self.bwd[MatrixId.C].get(v, ()))
        return self.combined[layer].get(v, 0)

    def vertices(self, layer: int) -> Set[int]:
        """Vertices of a layer with at least one incident edge."""
        found: Set[int] = set()
        for matrix in range(4):
            left, right = MatrixId(matrix).layers
            if left == layer:
                found.update(self.fwd[matrix])
            if right == layer:
                found.update(self.bwd[matrix])
        return found

    # Updates

    def apply(self, event: UpdateEvent) -> int:
        """
        Apply an update event.

        Args:
            event: The layered update

        Returns:
            int: The new edge count

        Raises:
            DuplicateInsert: Insert of a present edge
            MissingDelete: Delete of an absent edge
            LayerMismatch: Negative vertex index
        """
        matrix = int(event.matrix)
        pairs = event.pairs()
        for a, b in pairs:
            if a < 0 or b < 0:
                raise LayerMismatch(f"Negative vertex index in {event}")
            present = self.has_edge(matrix, a, b)
            if event.op is Op.INSERT and present:
                raise DuplicateInsert(f"Edge {event.matrix.name}({a},{b}) already present")
            if event.op is Op.DELETE and not present:
                raise MissingDelete(f"Edge {event.matrix.name}({a},{b}) not present")
        for a, b in pairs:
            if event.op is Op.INSERT:
                self._insert(matrix, a, b)
            else:
                self._delete(matrix, a, b)
        return self.m

    def _insert(self, matrix: int, a: int, b: int) -> None:
        left, right = MatrixId(matrix).layers
        self.fwd[matrix].setdefault(a, set()).add(b)
        self.bwd[matrix].setdefault(b, set()).add(a)
        self._bump(left, a, 1)
        self._bump(right, b, 1)
        self.capacity[left] = max(self.capacity[left], a + 1)
        self.capacity[right] = max(self.capacity[right], b + 1)
        self.m += 1

    def _delete(self, matrix: int, a: int, b: int) -> None:
        left, right = MatrixId(matrix).layers
        targets = self.fwd[matrix][a]
        targets.discard(b)
        if not targets:
            del self.fwd[matrix][a]
        sources = self.bwd[matrix][b]
        sources.discard(a)
        if not sources:
            del self.bwd[matrix][b]
        self._bump(left, a, -1)
        self._bump(right, b, -1)
        self.m -= 1

    def _bump(self, layer: int, v: int, step: int) -> None:
        # combined degree covers A+B on L2 and B+C on L3 only, so D never counts
        if layer not in (L2, L3):
            return
        value = self.combined[layer].get(v, 0) + step
        if value:
            self.combined[layer][v] = value
        else:
            self.combined[layer].pop(v, None)

    # Copies

    def copy(self) -> "LayeredGraph":
        """Independent deep copy (used for phase snapshots)."""
        clone = LayeredGraph()
        clone.fwd = [{a: set(t) for a, t in adj.items()} for adj in self.fwd]
        clone.bwd = [{b: set(s) for b, s in adj.items()} for adj in self.bwd]
        clone.combined = [dict(c) for c in self.combined]
        clone.capacity = list(self.capacity)
        clone.m = self.m
        return clone

    def edge_sets(self) -> Tuple[frozenset, ...]:
        """Per-matrix edge sets, for equality checks."""
        return tuple(frozenset(self.edges(matrix)) for matrix in range(4))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LayeredGraph):
            return NotImplemented
        return self.edge_sets() == other.edge_sets()

    def __repr__(self) -> str:
        counts = ", ".join(f"{MatrixId(i).name}={self.edge_count(i)}" for i in range(4))
        return f"LayeredGraph(m={self.m}, {counts})"
