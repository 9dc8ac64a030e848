"""
Class transitions of single vertices.

A vertex whose degree leaves the band of its class keeps the old class while the
change its new class would cause is staged, one item neighbour at a time. The staged
delta for a store is coef * (paths through the vertex over processed items), where coef
is the difference of the store's filter on the new and the old class. Updates and other
completions arriving meanwhile are corrected into the staged delta, so merging it into
the live store at completion switches the vertex atomically.

Each transition stages against the live view and, for the phase-filtered on-the-fly
stores, against the next view as well. While a phase hand-over runs it also stages the
phase-product stores in the next view; items processed before the hand-over opened are
restaged there by the hand-over task.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Set

from modules.engines.main.stores import (
    ClassMap,
    OuterWrite,
    PhaseView,
    StoreSpec,
    class_factor,
    flip_delta,
    item_delta,
    item_write,
    restricted_factor,
)
from modules.graph.layered import L1, L2, L4, MatrixId, VertexRef
from modules.matmul.pair_count import PairCount
from modules.params.classes import classes_for

logger = logging.getLogger(__name__)


def item_matrix(layer: int) -> MatrixId:
    if layer == L1:
        return MatrixId.A
    if layer == L4:
        return MatrixId.C
    return MatrixId.B


def item_side(layer: int) -> int:
    """0 when the vertex is the first endpoint of its item matrix."""
    return 0 if layer in (L1, L2) else 1


@dataclass
class Transition:
    """In-flight class change of one vertex."""

    layer: int
    vertex: int
    old_class: str
    target: str
    start_degree: int
    deadline: int
    worklist: List[int] = field(default_factory=list)
    processed: Set[int] = field(default_factory=set)
    cursor: int = 0
    incident_updates: int = 0
    staged: Dict[str, PairCount] = field(default_factory=dict)
    coefs: Dict[str, int] = field(default_factory=dict)
    positions: Dict[str, int] = field(default_factory=dict)
    # phase-filtered on-the-fly stores in the next view
    next_staged: Dict[str, PairCount] = field(default_factory=dict)
    # phase-product stores in the next view, only while a hand-over runs
    rebased_staged: Optional[Dict[str, PairCount]] = None
    rebased: Set[int] = field(default_factory=set)
    rebase_end: int = 0
    closed: bool = False

    @property
    def key(self):
        return self.layer, self.vertex

    @property
    def ref(self) -> VertexRef:
        return VertexRef.at(self.layer, self.vertex)

    @property
    def done(self) -> bool:
        return self.cursor >= len(self.worklist)

    @property
    def growing(self) -> bool:
        order = classes_for(self.layer)
        return order.index(self.target) > order.index(self.old_class)

    def enqueue(self, items) -> None:
        queued = set(self.worklist)
        for y in sorted(items):
            if y not in queued:
                self.worklist.append(y)
                queued.add(y)

    def factor(self, spec: StoreSpec, classes: ClassMap):
        return restricted_factor(spec, classes, self.positions[spec.name], self.vertex, self.processed)

    def open_rebase(self, stores: Mapping[str, StoreSpec]) -> None:
        """Start staging the phase-product stores in the next view."""
        self.rebased_staged = {name: PairCount() for name in self.staged if stores[name].job}
        self.rebased = set()
        self.rebase_end = self.cursor


def start_transition(
    layer: int,
    vertex: int,
    old_class: str,
    target: str,
    degree: int,
    stores: Mapping[str, StoreSpec],
    items: Set[int],
    slack: int,
    rebasing: bool = False,
) -> Transition:
    """
    Create a transition and its empty staged deltas.

    items are the vertex's item neighbours in any graph a view may read. The deadline
    counts incident updates: slack * start degree when growing, half that when shrinking.
    """
    t = Transition(layer, vertex, old_class, target, degree, deadline=1)
    for spec in stores.values():
        pos = spec.position(layer)
        if pos is None:
            continue
        coef = spec.admits(pos, target) - spec.admits(pos, old_class)
        if coef:
            t.coefs[spec.name] = coef
            t.positions[spec.name] = pos
            t.staged[spec.name] = PairCount()
            if spec.phase_filtered and not spec.job:
                t.next_staged[spec.name] = PairCount()
    if rebasing:
        t.open_rebase(stores)
    budget = slack * max(degree, 1)
    t.deadline = max(1, budget if t.growing else budget // 2)
    if t.coefs:
        t.enqueue(items)
    logger.debug(f"Transition of {t.ref} {old_class}->{target} over {len(t.worklist)} items")
    return t


def step_transition(
    t: Transition,
    stores: Mapping[str, StoreSpec],
    view: PhaseView,
    next_view: PhaseView,
    classes: ClassMap,
    budget: float,
) -> int:
    """
    Stage items until the budget is used up or the worklist is exhausted.

    Returns:
        int: Work done
    """
    used = 0
    while not t.done and used < budget:
        y = t.worklist[t.cursor]
        for name, target in t.staged.items():
            spec = stores[name]
            used += item_delta(
                target, view, spec, class_factor(spec, classes), t.positions[name], t.vertex, y, t.coefs[name]
            )
        for name, target in t.next_staged.items():
            spec = stores[name]
            used += item_delta(
                target, next_view, spec, class_factor(spec, classes), t.positions[name], t.vertex, y, t.coefs[name]
            )
        if t.rebased_staged is not None:
            for name, target in t.rebased_staged.items():
                spec = stores[name]
                used += item_delta(
                    target, next_view, spec, class_factor(spec, classes), t.positions[name], t.vertex, y, t.coefs[name]
                )
            t.rebased.add(y)
        t.processed.add(y)
        t.cursor += 1
    return used


def restage_writes(
    t: Transition, y: int, stores: Mapping[str, StoreSpec], next_view: PhaseView, classes: ClassMap
) -> List[OuterWrite]:
    """Deferred next-view writes of an item processed before the hand-over opened."""
    writes = []
    for name, target in t.rebased_staged.items():
        spec = stores[name]
        write = item_write(
            target, next_view, spec, class_factor(spec, classes), t.positions[name], t.vertex, y, t.coefs[name]
        )
        if write is not None:
            writes.append(write)
    t.rebased.add(y)
    return writes


def flip_corrections(
    t: Transition,
    flipped: Transition,
    stores: Mapping[str, StoreSpec],
    view: PhaseView,
    next_view: PhaseView,
    classes: ClassMap,
) -> int:
    """
    Correct t's staged deltas for the class change of another vertex.

    Must run before the flipped vertex's class is set.
    """
    ops = 0
    layer, v = flipped.key
    targets = [(t.staged, view, t.processed), (t.next_staged, next_view, t.processed)]
    if t.rebased_staged is not None:
        targets.append((t.rebased_staged, next_view, t.rebased))
    for staged, basis, done in targets:
        for name, delta in staged.items():
            spec = stores[name]
            pos = spec.position(layer)
            if pos is None or pos == t.positions[name]:
                continue
            if pos == spec.item_position(t.positions[name]) and v not in done:
                continue
            coef = spec.admits(pos, flipped.target) - spec.admits(pos, flipped.old_class)
            factor = restricted_factor(spec, classes, t.positions[name], t.vertex, done)
            ops += flip_delta(delta, basis, spec, factor, pos, v, coef * t.coefs[name])
    return ops
