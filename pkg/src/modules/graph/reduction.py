"""
General-graph to 4-layered reduction and copy rotation.

Every general vertex appears in all four layers and every general edge is placed,
in both orientations, in all four matrices. For an inserted edge the copies go in
D, C, B, A order and the query is taken at the D event; deletions run A, B, C, D and
query at the D event. Either way the queried 3-walk count sees no copy of (u, v) in
A, B or C, so walks equal paths.
"""

from dataclasses import dataclass
from typing import List, Tuple

from core.errors import SelfLoop
from modules.graph.layered import MatrixId, Op, UpdateEvent

INSERT_ORDER = (MatrixId.D, MatrixId.C, MatrixId.B, MatrixId.A)
DELETE_ORDER = (MatrixId.A, MatrixId.B, MatrixId.C, MatrixId.D)


@dataclass(frozen=True)
class GeneralUpdate:
    """An update of an undirected simple general graph."""

    op: Op
    u: int
    v: int

    @property
    def key(self) -> Tuple[int, int]:
        """Unordered pair key."""
        return (self.u, self.v) if self.u < self.v else (self.v, self.u)

    def inverse(self) -> "GeneralUpdate":
        return GeneralUpdate(self.op.inverse(), self.u, self.v)

    def __str__(self) -> str:
        return f"{self.op.value} {self.u} {self.v}"


def general_to_layered(update: GeneralUpdate) -> Tuple[List[UpdateEvent], int]:
    """
    Expand a general update into four mirrored layered events.

    Args:
        update: The general-graph update

    Returns:
        tuple: (events in application order, index of the event whose query is the delta)

    Raises:
        SelfLoop: If u == v
    """
    if update.u == update.v:
        raise SelfLoop(f"Self-loop on vertex {update.u}")
    if update.op is Op.INSERT:
        order = INSERT_ORDER
    else:
        order = DELETE_ORDER
    events = [UpdateEvent(update.op, matrix, update.v, update.u, mirrored=True) for matrix in order]
    query_index = order.index(MatrixId.D)
    return events, query_index


def rotate_event(event: UpdateEvent, k: int) -> UpdateEvent:
    """
    Map an event into rotated copy k.

    Copy k has layer L'_i = L_{i+k}, so matrix i becomes matrix (i - k) mod 4 and the
    endpoints keep their order.
    """
    return UpdateEvent(event.op, event.matrix.rotated(-k), event.a, event.b, event.mirrored)


def answering_copy(matrix: MatrixId) -> int:
    """Index of the rotated copy in which the given matrix plays the role of D."""
    return (int(matrix) + 1) % 4
