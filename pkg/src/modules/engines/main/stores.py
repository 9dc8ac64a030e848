"""
Path-product stores of the main engine.

A store holds, for every pair (first vertex, last vertex) of a run of consecutive
matrices, the signed number of walks through the run whose vertices pass per-position
class filters and whose edges come from per-matrix phase slices. Phase "o" reads the
old snapshot, phase "n" reads current minus old (signed), no phase reads the current
graph.

Every maintenance step is expressed through two primitives over a factor function
(position, vertex) -> weight: the change caused by one edge, and the paths through one
pinned vertex. The second can also be built as a deferred write that a budgeted task
applies a slice of entries at a time.
"""

import logging
from dataclasses import dataclass
from itertools import product
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Set, Tuple

from modules.graph.layered import L1, L4, LayeredGraph, MatrixId
from modules.matmul.pair_count import PairCount
from modules.params.classes import classes_for

logger = logging.getLogger(__name__)

A, B, C = MatrixId.A, MatrixId.B, MatrixId.C
PHASES = ("o", "n")

Filter = Optional[FrozenSet[str]]
Factor = Callable[[int, int], int]


def only(*classes: str) -> FrozenSet[str]:
    return frozenset(classes)


@dataclass(frozen=True)
class StoreSpec:
    """
    Declaration of one store.

    Attributes:
        name: Store name
        chain: Consecutive matrices, e.g. (A, B)
        classes: One class filter per position (len(chain) + 1), None admits every class
        phases: One phase per matrix, None for the current graph
        job: Filled from phase jobs at boundaries rather than recomputed
    """

    name: str
    chain: Tuple[MatrixId, ...]
    classes: Tuple[Filter, ...]
    phases: Tuple[Optional[str], ...]
    job: bool = False

    @property
    def layers(self) -> Tuple[int, ...]:
        return (self.chain[0].layers[0],) + tuple(m.layers[1] for m in self.chain)

    @property
    def length(self) -> int:
        return len(self.chain)

    @property
    def phase_filtered(self) -> bool:
        return any(p is not None for p in self.phases)

    def position(self, layer: int) -> Optional[int]:
        layers = self.layers
        return layers.index(layer) if layer in layers else None

    def index_of(self, matrix: MatrixId) -> Optional[int]:
        return self.chain.index(matrix) if matrix in self.chain else None

    def allowed(self, pos: int) -> FrozenSet[str]:
        """Classes admitted at a position."""
        cls = self.classes[pos]
        return cls if cls is not None else frozenset(classes_for(self.layers[pos]))

    def phase_set(self, i: int) -> Tuple[str, ...]:
        return PHASES if self.phases[i] is None else (self.phases[i],)

    def admits(self, pos: int, cls: str) -> int:
        return 1 if self.classes[pos] is None or cls in self.classes[pos] else 0

    def item_position(self, pos: int) -> int:
        """Position of the neighbours a transition of the vertex at pos iterates over."""
        layer = self.layers[pos]
        matrix = A if layer == L1 else C if layer == L4 else B
        i = self.chain.index(matrix)
        return i + 1 if i == pos else i


def _spec(name: str, chain, classes, phases=None, job: bool = False) -> StoreSpec:
    phases = tuple(phases) if phases is not None else (None,) * len(chain)
    return StoreSpec(name, tuple(chain), tuple(classes), phases, job)


def build_catalog() -> Dict[str, StoreSpec]:
    """All stores of the main engine keyed by name."""
    S, D, T, H, M = only("S"), only("D"), only("T"), only("H"), only("M")
    specs: List[StoreSpec] = [
        # common wedges through sparse intermediates
        _spec("ab_s", (A, B), (None, S, None)),
        _spec("bc_s", (B, C), (None, S, None)),
        # wedges through tiny intermediates
        _spec("ab_t", (A, B), (None, T, None)),
        _spec("bc_t", (B, C), (None, T, None)),
        # low-use dense stores split by phase
        _spec("ab_nd_odd", (A, B), (None, D, D), ("n", "o")),
        _spec("bc_odd_nd", (B, C), (D, D, None), ("o", "n")),
        # dense wedges for high and medium endpoints
        _spec("ab_hd_dd", (A, B), (H, D, D)),
        _spec("ab_md_dd", (A, B), (M, D, D)),
        _spec("bc_dd_dh", (B, C), (D, D, H)),
        _spec("bc_dd_dm", (B, C), (D, D, M)),
    ]
    # high-high sparse triples for every phase split except all-old and old-new-old
    for phases in ("nnn", "nno", "onn", "non", "noo", "oon"):
        specs.append(_spec(f"abc_hssh_{phases}", (A, B, C), (H, S, S, H), tuple(phases)))
    specs.extend([
        _spec("aht_tt_th", (A, B, C), (H, T, T, H)),
        _spec("amt_tt_th", (A, B, C), (M, T, T, H)),
        _spec("aht_tt_tm", (A, B, C), (H, T, T, M)),
        _spec("aht_ts_sh", (A, B, C), (H, T, S, H)),
        _spec("ahs_st_th", (A, B, C), (H, S, T, H)),
    ])
    for left, right in product("SD", repeat=2):
        pair = left + right
        specs.append(_spec(f"old_ab_{pair}", (A, B), (None, only(left), only(right)), ("o", "o"), job=True))
        specs.append(_spec(f"old_bc_{pair}", (B, C), (only(left), only(right), None), ("o", "o"), job=True))
        specs.append(_spec(f"old_abc_{pair}", (A, B, C), (None, only(left), only(right), None), ("o", "o", "o"), job=True))
    return {spec.name: spec for spec in specs}


class DeltaAdjacency:
    """Signed current-minus-old adjacency for A, B and C."""

    def __init__(self):
        self.fwd: List[Dict[int, Dict[int, int]]] = [{} for _ in range(3)]
        self.bwd: List[Dict[int, Dict[int, int]]] = [{} for _ in range(3)]

    def add(self, matrix: int, a: int, b: int, value: int) -> None:
        for table, key, other in ((self.fwd[matrix], a, b), (self.bwd[matrix], b, a)):
            row = table.setdefault(key, {})
            new = row.get(other, 0) + value
            if new:
                row[other] = new
            else:
                row.pop(other, None)
                if not row:
                    del table[key]

    def get(self, matrix: int, a: int, b: int) -> int:
        return self.fwd[matrix].get(a, {}).get(b, 0)

    def edges(self, matrix: int) -> Iterable[Tuple[int, int, int]]:
        for a, row in self.fwd[matrix].items():
            for b, value in row.items():
                yield a, b, value


class PhaseView:
    """Read access to the phase slices of the current graph."""

    def __init__(self, current: LayeredGraph, old: LayeredGraph, delta: DeltaAdjacency):
        self.current = current
        self.old = old
        self.delta = delta

    def _graph(self, phase: Optional[str]) -> LayeredGraph:
        return self.old if phase == "o" else self.current

    def fwd(self, matrix: int, phase: Optional[str], a: int) -> Mapping[int, int]:
        if phase == "n":
            return self.delta.fwd[matrix].get(a, {})
        return dict.fromkeys(self._graph(phase).out(matrix, a), 1)

    def bwd(self, matrix: int, phase: Optional[str], b: int) -> Mapping[int, int]:
        if phase == "n":
            return self.delta.bwd[matrix].get(b, {})
        return dict.fromkeys(self._graph(phase).inc(matrix, b), 1)

    def value(self, matrix: int, phase: Optional[str], a: int, b: int) -> int:
        if phase == "n":
            return self.delta.get(matrix, a, b)
        return 1 if self._graph(phase).has_edge(matrix, a, b) else 0

    def rows(self, matrix: int, phase: Optional[str]) -> Iterable[int]:
        if phase == "n":
            return list(self.delta.fwd[matrix])
        return list(self._graph(phase).fwd[matrix])

    def neighbours(self, matrix: int, side: int, v: int) -> Set[int]:
        """Vertices joined to v in the current or old graph; side 0 means v is the first endpoint."""
        if side == 0:
            return self.current.out(matrix, v) | self.old.out(matrix, v)
        return self.current.inc(matrix, v) | self.old.inc(matrix, v)


class ClassMap:
    """Effective classes per layer; absent vertices are tiny."""

    def __init__(self, classes: Optional[List[Dict[int, str]]] = None):
        self.classes: List[Dict[int, str]] = classes if classes is not None else [{} for _ in range(4)]

    def get(self, layer: int, v: int) -> str:
        return self.classes[layer].get(v, "T")

    def set(self, layer: int, v: int, cls: str) -> None:
        if cls == "T":
            self.classes[layer].pop(v, None)
        else:
            self.classes[layer][v] = cls

    def copy(self) -> "ClassMap":
        return ClassMap([dict(c) for c in self.classes])

    def members(self, layer: int, cls: str) -> Set[int]:
        return {v for v, c in self.classes[layer].items() if c == cls}


def class_factor(spec: StoreSpec, classes: ClassMap) -> Factor:
    """Factor admitting the vertices whose class passes each position's filter."""
    layers = spec.layers

    def factor(pos: int, v: int) -> int:
        return spec.admits(pos, classes.get(layers[pos], v))

    return factor


def restricted_factor(spec: StoreSpec, classes: ClassMap, pin: int, z: int, processed: Set[int]) -> Factor:
    """
    Factor for the paths through z at position pin whose item neighbour is processed.

    z's own class is not applied; the caller multiplies by the flip coefficient.
    """
    base = class_factor(spec, classes)
    item = spec.item_position(pin)

    def factor(pos: int, v: int) -> int:
        if pos == pin:
            return 1 if v == z else 0
        if pos == item and v not in processed:
            return 0
        return base(pos, v)

    return factor


def left_walk(view: PhaseView, spec: StoreSpec, factor: Factor, pos: int, p: int) -> Dict[int, int]:
    """Weighted first vertices of walks from position 0 to p at pos; p's own factor excluded."""
    acc: Dict[int, int] = {p: 1}
    for i in range(pos - 1, -1, -1):
        nxt: Dict[int, int] = {}
        for b, wb in acc.items():
            for a, wa in view.bwd(spec.chain[i], spec.phases[i], b).items():
                f = factor(i, a)
                if f:
                    nxt[a] = nxt.get(a, 0) + wb * wa * f
        acc = {k: v for k, v in nxt.items() if v}
    return acc


def right_walk(view: PhaseView, spec: StoreSpec, factor: Factor, pos: int, q: int) -> Dict[int, int]:
    """Weighted last vertices of walks from q at pos to the end; q's own factor excluded."""
    acc: Dict[int, int] = {q: 1}
    for i in range(pos, spec.length):
        nxt: Dict[int, int] = {}
        for a, wa in acc.items():
            for b, wb in view.fwd(spec.chain[i], spec.phases[i], a).items():
                f = factor(i + 1, b)
                if f:
                    nxt[b] = nxt.get(b, 0) + wa * wb * f
        acc = {k: v for k, v in nxt.items() if v}
    return acc


@dataclass
class OuterWrite:
    """
    Pending coef * left[r] * right[c] write into a store, applied entry by entry.

    The walks are taken when the write is built; only the entries are deferred.
    """

    target: PairCount
    left: List[Tuple[int, int]]
    right: List[Tuple[int, int]]
    coef: int
    cursor: int = 0

    @property
    def size(self) -> int:
        return len(self.left) * len(self.right)

    @property
    def done(self) -> bool:
        return self.cursor >= self.size

    def advance(self, budget: float) -> int:
        """Write at most budget entries; returns the number written."""
        steps = min(budget, self.size - self.cursor)
        width = len(self.right)
        for k in range(self.cursor, self.cursor + steps):
            r, lv = self.left[k // width]
            c, rv = self.right[k % width]
            self.target.add(r, c, self.coef * lv * rv)
        self.cursor += steps
        return steps


@dataclass
class TableWrite:
    """Pending copy of (row, col, value) entries into a store."""

    target: PairCount
    entries: List[Tuple[int, int, int]]
    cursor: int = 0

    @property
    def done(self) -> bool:
        return self.cursor >= len(self.entries)

    def advance(self, budget: float) -> int:
        steps = min(budget, len(self.entries) - self.cursor)
        for r, c, value in self.entries[self.cursor:self.cursor + steps]:
            self.target.add(r, c, value)
        self.cursor += steps
        return steps


def _outer(target: PairCount, left: Dict[int, int], right: Dict[int, int], coef: int) -> Optional[OuterWrite]:
    if not coef or not left or not right:
        return None
    return OuterWrite(target, list(left.items()), list(right.items()), coef)


def _run(write: Optional[OuterWrite]) -> int:
    return write.advance(float("inf")) if write is not None else 0


def edge_delta(
    target: PairCount, view: PhaseView, spec: StoreSpec, factor: Factor,
    matrix: MatrixId, a: int, b: int, change: int,
) -> int:
    """
    Add the change of spec's product when the live slice of (a, b) in matrix moves by change.

    Returns:
        int: Entries touched
    """
    i = spec.index_of(matrix)
    if i is None or spec.phases[i] == "o" or not change:
        return 0
    coef = change * factor(i, a) * factor(i + 1, b)
    if not coef:
        return 0
    left = left_walk(view, spec, factor, i, a)
    right = right_walk(view, spec, factor, i + 1, b)
    return target.add_outer(left, right, coef) + 1


def flip_write(
    target: PairCount, view: PhaseView, spec: StoreSpec, factor: Factor, pos: int, z: int, coef: int
) -> Optional[OuterWrite]:
    """Deferred coef times the paths through z at pos (z's own factor excluded)."""
    if not coef:
        return None
    return _outer(target, left_walk(view, spec, factor, pos, z), right_walk(view, spec, factor, pos, z), coef)


def flip_delta(target: PairCount, view: PhaseView, spec: StoreSpec, factor: Factor, pos: int, z: int, coef: int) -> int:
    """Add coef times the paths through z at pos (z's own factor excluded)."""
    if not coef:
        return 0
    return _run(flip_write(target, view, spec, factor, pos, z, coef)) + 1


def item_write(
    target: PairCount, view: PhaseView, spec: StoreSpec, factor: Factor,
    pos: int, z: int, y: int, coef: int,
) -> Optional[OuterWrite]:
    """Deferred coef times the paths through z at pos that use the item neighbour y."""
    item = spec.item_position(pos)
    if item == pos + 1:
        weight = view.value(spec.chain[pos], spec.phases[pos], z, y) * factor(item, y)
        if not weight:
            return None
        left = left_walk(view, spec, factor, pos, z)
        right = right_walk(view, spec, factor, item, y)
    else:
        weight = view.value(spec.chain[item], spec.phases[item], y, z) * factor(item, y)
        if not weight:
            return None
        left = left_walk(view, spec, factor, item, y)
        right = right_walk(view, spec, factor, pos, z)
    return _outer(target, left, right, coef * weight)


def item_delta(
    target: PairCount, view: PhaseView, spec: StoreSpec, factor: Factor,
    pos: int, z: int, y: int, coef: int,
) -> int:
    """Add coef times the paths through z at pos that use the item neighbour y."""
    return _run(item_write(target, view, spec, factor, pos, z, y, coef)) + 1


def recompute(view: PhaseView, spec: StoreSpec, factor: Factor) -> Tuple[PairCount, int]:
    """From-scratch value of a store and the work it took."""
    result = PairCount()
    ops = 0
    for a in view.rows(spec.chain[0], spec.phases[0]):
        f = factor(0, a)
        if not f:
            continue
        right = right_walk(view, spec, factor, 0, a)
        for c, value in right.items():
            result.add(a, c, f * value)
        ops += len(right) + 1
    return result, ops
