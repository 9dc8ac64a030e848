"""
Main engine: fully dynamic 3-path queries with updates in A, B and C.

Updates are grouped into phases of phase_size updates. The graph at the start of the
previous phase is the old snapshot; every edge is read either from it (phase "o") or
from the signed difference to the current graph (phase "n"). Products over the old
snapshot are computed by phase jobs while the next phase runs; everything else is kept
exact on the fly. The phase-filtered stores are also kept over the next view, so when
a phase ends a budgeted hand-over only has to install the products while queries keep
reading the live view. Vertices are classed by degree (T/L/M/H on L1 and L4, T/S/D on
L2 and L3) and queries are answered by the table-driven plans in plans.py.
"""

import logging
from itertools import product
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

from core.errors import BootstrapRange, DeadlineMissed, RebuildRequired
from core.interfaces import LayeredEngineInterface, UpdateStats
from modules.engines.main.plans import (
    ALL_PHASES,
    DENSE,
    PAIRS,
    TRIPLE,
    VIA_DENSE_W,
    VIA_DENSE_X,
    VIA_W,
    VIA_X,
    WALK_U,
    WALK_V,
    WARMUP,
    Key,
    Method,
    build_plans,
    method_keys,
)
from modules.engines.main.stores import (
    ClassMap,
    DeltaAdjacency,
    PhaseView,
    build_catalog,
    class_factor,
    edge_delta,
    recompute,
)
from modules.engines.main.handover import HandOver
from modules.engines.main.transitions import (
    Transition,
    flip_corrections,
    item_matrix,
    item_side,
    start_transition,
    step_transition,
)
from modules.engines.naive import LayeredNaiveEngine
from modules.engines.warmup import WarmupEngine
from modules.graph.layered import L1, L2, L3, L4, LAYERS, LayeredGraph, MatrixId, UpdateEvent, VertexRef, vertex_index
from modules.matmul.jobs import ProductJob, job_step
from modules.matmul.matrix import CountMatrix
from modules.matmul.pair_count import PairCount
from modules.params.classes import canonical_class, in_band
from modules.params.thresholds import Thresholds

logger = logging.getLogger(__name__)

A, B, C, D = MatrixId.A, MatrixId.B, MatrixId.C, MatrixId.D
WARMUP_ROUTES = ("SS", "DD")
REBUILD_POLICIES = ("auto", "fixed", "strict")

ThresholdSource = Callable[[int], Thresholds]


class MainEngine(LayeredEngineInterface):
    """
    Exact 3-path engine over a fully dynamic layered graph.

    Args:
        thresholds: Explicit thresholds; implies the fixed rebuild policy unless one is given
        threshold_source: Callable m -> Thresholds used for bootstrap and rebuilds
        rebuild_policy: auto (re-derive thresholds on drift), strict (raise RebuildRequired)
            or fixed (never rebuild on drift)
        strict_deadlines: Raise DeadlineMissed instead of forcing late work
        transition_slack: Multiplier of the transition deadline
        backend: matmul backend name recorded for the phase products
    """

    def __init__(
        self,
        thresholds: Optional[Thresholds] = None,
        threshold_source: Optional[ThresholdSource] = None,
        rebuild_policy: Optional[str] = None,
        strict_deadlines: bool = True,
        transition_slack: int = 1,
        backend: str = "blocked",
    ):
        if thresholds is None and threshold_source is None:
            raise ValueError("MainEngine needs thresholds or a threshold source")
        policy = rebuild_policy or ("fixed" if thresholds is not None else "auto")
        if policy not in REBUILD_POLICIES:
            raise ValueError(f"Unknown rebuild policy: {policy}")
        if policy == "auto" and threshold_source is None:
            raise ValueError("The auto rebuild policy needs a threshold source")
        self.rebuild_policy = policy
        self.threshold_source = threshold_source
        self.strict_deadlines = strict_deadlines
        self.transition_slack = transition_slack
        self.backend = backend

        self.catalog = build_catalog()
        self.plans = build_plans(self.catalog)
        self._factors = {}

        self.graph = LayeredGraph()
        self.old = LayeredGraph()
        self.pending = LayeredGraph()
        self.delta = DeltaAdjacency()
        self.next_delta = DeltaAdjacency()
        self.view = PhaseView(self.graph, self.old, self.delta)
        self.next_view = PhaseView(self.graph, self.pending, self.next_delta)
        self.classes = ClassMap()
        self.dense = {L2: set(), L3: set()}
        self.stores: Dict[str, PairCount] = {name: PairCount() for name in self.catalog}
        # phase-filtered on-the-fly stores over the next view
        self.next_names = [name for name, spec in self.catalog.items() if spec.phase_filtered and not spec.job]
        self.next_stores: Dict[str, PairCount] = {name: PairCount() for name in self.next_names}
        self.transitions: Dict[Tuple[int, int], Transition] = {}
        self.warmups: Dict[str, WarmupEngine] = {}
        self.next_warmups: Dict[str, WarmupEngine] = {}
        self.jobs: Dict[str, ProductJob] = {}
        self.job_classes = ClassMap()
        self.flips: List[Tuple[int, int, str, str]] = []
        self.handover: Optional[HandOver] = None
        self.naive: Optional[LayeredNaiveEngine] = None
        self.thresholds: Optional[Thresholds] = None

        self.updates = 0
        self.phase_index = 0
        self.phase_count = 0
        self.counters = {
            "rebuilds": 0,
            "transitions_started": 0,
            "transitions_completed": 0,
            "transitions_cancelled": 0,
            "deadline_misses": 0,
            "boundary_ops": 0,
            "onthefly_ops": 0,
            "deferred_ops": 0,
        }
        self._stats = UpdateStats()

        if thresholds is not None:
            self.rebuild(thresholds)
        else:
            self._enter_bootstrap()
        logger.info(f"Main engine initialized (policy={policy}, bootstrap={self.naive is not None})")

    # Setup

    def _enter_bootstrap(self) -> None:
        self._absorb_warmups()
        self.warmups = {}
        self.next_warmups = {}
        self.thresholds = None
        self.naive = LayeredNaiveEngine(graph=self.graph)
        self.transitions.clear()
        self.jobs = {}
        self.handover = None

    def _try_upgrade(self) -> None:
        try:
            thresholds = self.threshold_source(self.graph.m)
        except BootstrapRange:
            return
        logger.info(f"Leaving bootstrap at m={self.graph.m}")
        self.naive = None
        self.rebuild(thresholds)

    def _factor(self, name: str):
        factor = self._factors.get(name)
        if factor is None:
            factor = self._factors[name] = class_factor(self.catalog[name], self.classes)
        return factor

    def _set_class(self, layer: int, v: int, cls: str) -> None:
        self.classes.set(layer, v, cls)
        if layer in self.dense:
            if cls == "D":
                self.dense[layer].add(v)
            else:
                self.dense[layer].discard(v)

    def rebuild(self, thresholds: Thresholds) -> None:
        """
        Recompute classes, stores, warm-ups and phase jobs from scratch.

        The old and pending snapshots both become the current graph.
        """
        self._absorb_warmups()
        self.thresholds = thresholds
        self.transitions.clear()
        self.handover = None
        self.classes = ClassMap()
        self._factors = {}
        self.dense = {L2: set(), L3: set()}
        for layer in LAYERS:
            for v in self.graph.vertices(layer):
                self._set_class(layer, v, canonical_class(layer, self.graph.class_degree(layer, v), thresholds))
        self.old = self.graph.copy()
        self.pending = self.graph.copy()
        self.delta = DeltaAdjacency()
        self.next_delta = DeltaAdjacency()
        self.view = PhaseView(self.graph, self.old, self.delta)
        self.next_view = PhaseView(self.graph, self.pending, self.next_delta)
        ops = 0
        for name, spec in self.catalog.items():
            self.stores[name], work = recompute(self.view, spec, self._factor(name))
            ops += work
        self.next_stores = {name: PairCount() for name in self.next_names}
        self.warmups = self._new_warmups(self.old)
        self.next_warmups = self._new_warmups(self.pending)
        self._start_jobs()
        self.phase_count = 0
        self.counters["rebuilds"] += 1
        self.counters["boundary_ops"] += ops
        self._stats.ops += ops
        self._stats.rebuild = True
        logger.info(f"Rebuilt at m={self.graph.m} (m_hat={thresholds.m_hat}, high={thresholds.high})")

    def _new_warmups(self, snapshot: LayeredGraph) -> Dict[str, WarmupEngine]:
        return {
            route: WarmupEngine(snapshot, self.thresholds, strict=self.strict_deadlines, backend=self.backend)
            for route in WARMUP_ROUTES
        }

    def warmup_instances(self) -> List[WarmupEngine]:
        """Live and next-view warm-up engines."""
        return list(self.warmups.values()) + list(self.next_warmups.values())

    def _absorb_warmups(self) -> None:
        for warmup in self.warmup_instances():
            self._stats.absorb(warmup.take_stats())

    def _route(self, w: int, x: int) -> str:
        return self.classes.get(L2, w) + self.classes.get(L3, x)

    def _start_jobs(self) -> None:
        """Phase products over the pending snapshot with the classes as they are now."""
        self.job_classes = self.classes.copy()
        self.flips = []
        snapshot = self.pending
        deadline = self.thresholds.phase_size
        jobs = {}
        for left, right in product("SD", repeat=2):
            pair = left + right
            middle2 = self.job_classes.members(L2, left)
            middle3 = self.job_classes.members(L3, right)
            a = CountMatrix.from_adjacency(snapshot.fwd[A], cols=middle2, row_space="L1", col_space="L2")
            b = CountMatrix.from_adjacency(snapshot.fwd[B], rows=middle2, cols=middle3, row_space="L2", col_space="L3")
            c = CountMatrix.from_adjacency(snapshot.fwd[C], rows=middle3, row_space="L3", col_space="L4")
            jobs[f"old_ab_{pair}"] = ProductJob([a, b], deadline=deadline, name=f"old_ab_{pair}")
            jobs[f"old_bc_{pair}"] = ProductJob([b, c], deadline=deadline, name=f"old_bc_{pair}")
            jobs[f"old_abc_{pair}"] = ProductJob([a, b, c], deadline=deadline, name=f"old_abc_{pair}")
        self.jobs = jobs

    # Updates

    def apply(self, event: UpdateEvent) -> None:
        """
        Apply a layered update.

        Raises:
            DuplicateInsert, MissingDelete: Invalid update
            DeadlineMissed: Late phase job, hand-over or transition with strict deadlines
            RebuildRequired: Edge count left the window under the strict policy
        """
        self.graph.apply(event)
        self.updates += 1
        if self.naive is not None:
            self.naive.absorb(event)
            self._stats.absorb(self.naive.take_stats())
            self._try_upgrade()
            return
        if event.matrix is not D:
            for a, b in event.pairs():
                self._apply_pair(event.matrix, a, b, event.sign)
            for a, b in event.pairs():
                left, right = event.matrix.layers
                self._check_vertex(left, a)
                self._check_vertex(right, b)
            self._advance_phase()
        self._absorb_warmups()
        self._check_drift()

    def _apply_pair(self, matrix: MatrixId, a: int, b: int, sign: int) -> None:
        self.delta.add(matrix, a, b, sign)
        self.next_delta.add(matrix, a, b, sign)
        ops = 0
        for name, spec in self.catalog.items():
            ops += edge_delta(self.stores[name], self.view, spec, self._factor(name), matrix, a, b, sign)
        for name, store in self.next_stores.items():
            spec = self.catalog[name]
            ops += edge_delta(store, self.next_view, spec, self._factor(name), matrix, a, b, sign)
        for t in self.transitions.values():
            for staged, view in ((t.staged, self.view), (t.next_staged, self.next_view)):
                for name, delta in staged.items():
                    spec = self.catalog[name]
                    if matrix in spec.chain:
                        ops += edge_delta(delta, view, spec, t.factor(spec, self.classes), matrix, a, b, sign * t.coefs[name])
            if item_matrix(t.layer) is matrix and t.coefs:
                own, other = (a, b) if item_side(t.layer) == 0 else (b, a)
                if own == t.vertex:
                    t.enqueue((other,))
        if matrix is B:
            route = self._route(a, b)
            if route in WARMUP_ROUTES:
                self.warmups[route].apply_b(a, b, sign)
                self.next_warmups[route].apply_b(a, b, sign)
        self.counters["onthefly_ops"] += ops
        self._stats.ops += ops

    def _check_vertex(self, layer: int, v: int) -> None:
        th = self.thresholds
        degree = self.graph.class_degree(layer, v)
        t = self.transitions.get((layer, v))
        if t is not None:
            t.incident_updates += 1
            if in_band(layer, t.old_class, degree, th):
                del self.transitions[(layer, v)]
                t.closed = True
                self.counters["transitions_cancelled"] += 1
                return
            self._step(t)
            return
        cls = self.classes.get(layer, v)
        if in_band(layer, cls, degree, th):
            return
        target = canonical_class(layer, degree, th)
        matrix, side = item_matrix(layer), item_side(layer)
        items = self.view.neighbours(matrix, side, v) | self.next_view.neighbours(matrix, side, v)
        t = start_transition(
            layer, v, cls, target, degree, self.catalog, items, self.transition_slack, rebasing=self.handover is not None
        )
        self.transitions[(layer, v)] = t
        self.counters["transitions_started"] += 1
        self._step(t)

    def _step(self, t: Transition) -> None:
        ops = step_transition(t, self.catalog, self.view, self.next_view, self.classes, self.thresholds.per_update_budget)
        if not t.done and t.incident_updates >= t.deadline:
            if self.strict_deadlines:
                raise DeadlineMissed(
                    f"Transition of {t.ref} unfinished after {t.incident_updates} updates",
                    owner=f"transition:{t.ref}",
                )
            logger.warning(f"Transition of {t.ref} missed its deadline; forcing completion")
            self.counters["deadline_misses"] += 1
            ops += step_transition(t, self.catalog, self.view, self.next_view, self.classes, float("inf"))
        self.counters["deferred_ops"] += ops
        self._stats.ops += ops
        if t.done:
            self._complete(t)

    def _complete(self, t: Transition) -> None:
        layer, v = t.key
        del self.transitions[t.key]
        t.closed = True
        ops = 0
        for name, staged in t.staged.items():
            ops += self.stores[name].merge(staged)
        for name, staged in t.next_staged.items():
            ops += self.next_stores[name].merge(staged)
        for other in self.transitions.values():
            ops += flip_corrections(other, t, self.catalog, self.view, self.next_view, self.classes)
        self._set_class(layer, v, t.target)
        self.flips.append((layer, v, t.old_class, t.target))
        if layer in (L2, L3):
            ops += self._reroute(layer, v, t.old_class, t.target)
        self.counters["transitions_completed"] += 1
        self.counters["deferred_ops"] += ops
        self._stats.ops += ops
        if not in_band(layer, t.target, self.graph.class_degree(layer, v), self.thresholds):
            self._check_vertex(layer, v)

    def _reroute(self, layer: int, v: int, old: str, new: str) -> int:
        """Move v's signed new-phase B edges between the warm-up instances of both views."""
        ops = 0
        for delta, warmups in ((self.delta, self.warmups), (self.next_delta, self.next_warmups)):
            if layer == L2:
                edges = [(v, x, value) for x, value in delta.fwd[B].get(v, {}).items()]
            else:
                edges = [(w, v, value) for w, value in delta.bwd[B].get(v, {}).items()]
            for w, x, value in edges:
                other = self.classes.get(L3, x) if layer == L2 else self.classes.get(L2, w)
                before = old + other if layer == L2 else other + old
                after = new + other if layer == L2 else other + new
                if before in warmups:
                    warmups[before].apply_b(w, x, -value)
                if after in warmups:
                    warmups[after].apply_b(w, x, value)
            ops += len(edges)
        return ops

    # Phases

    def _advance_phase(self) -> None:
        budget = self.thresholds.per_update_budget
        if self.handover is not None:
            self._tick_handover(budget)
            return
        used = 0
        for name, job in self.jobs.items():
            if job.done:
                continue
            before = job.ops
            try:
                job_step(job, max(budget - used, 0))
            except DeadlineMissed:
                if self.strict_deadlines:
                    raise
                logger.warning(f"Phase job {name} missed its deadline; forcing completion")
                job.finish()
                self.counters["deadline_misses"] += 1
            used += job.ops - before
        self.counters["deferred_ops"] += used
        self._stats.record_slice(used, budget)
        self.phase_count += 1
        if self.phase_count >= self.thresholds.phase_size:
            self._open_handover()

    def _open_handover(self) -> None:
        for name, job in self.jobs.items():
            if not job.done:
                if self.strict_deadlines:
                    raise DeadlineMissed(f"Phase job {name} unfinished at the phase boundary", owner=name)
                logger.warning(f"Phase job {name} unfinished at the phase boundary; forcing completion")
                before = job.ops
                job.finish()
                self.counters["deadline_misses"] += 1
                self.counters["deferred_ops"] += job.ops - before
                self._stats.record_slice(job.ops - before, self.thresholds.per_update_budget)
        for t in self.transitions.values():
            t.open_rebase(self.catalog)
        self.handover = HandOver(
            {name: job.result for name, job in self.jobs.items()},
            self.catalog,
            self.job_classes,
            self.flips,
            self.next_view,
            self.classes,
            list(self.transitions.values()),
            deadline=self.thresholds.phase_size,
        )
        logger.debug(f"Phase {self.phase_index} hand-over opened with {len(self.transitions)} transitions in flight")
        if self.handover.done:
            self._switch()

    def _tick_handover(self, budget: int) -> None:
        handover = self.handover
        used, forced = handover.tick(budget, self.strict_deadlines)
        if forced:
            self.counters["deadline_misses"] += 1
        self.counters["boundary_ops"] += used
        self._stats.record_slice(used, budget)
        self.phase_count += 1
        if handover.done:
            self._switch()

    def _switch(self) -> None:
        """Make the next view live and start the next phase's products."""
        tables = self.handover.tables
        self.handover = None
        self.old = self.pending
        self.pending = self.graph.copy()
        self.delta = self.next_delta
        self.next_delta = DeltaAdjacency()
        self.view = self.next_view
        self.next_view = PhaseView(self.graph, self.pending, self.next_delta)
        for name, table in tables.items():
            self.stores[name] = table
        for name in self.next_names:
            self.stores[name] = self.next_stores[name]
            self.next_stores[name] = PairCount()
        for t in self.transitions.values():
            if t.rebased_staged is not None:
                t.staged.update(t.rebased_staged)
            for name in t.next_staged:
                t.staged[name] = t.next_staged[name]
                t.next_staged[name] = PairCount()
            t.rebased_staged = None
            t.rebased = set()
            t.rebase_end = 0
        self._absorb_warmups()
        self.warmups = self.next_warmups
        self.next_warmups = self._new_warmups(self.pending)
        self._start_jobs()
        self.phase_index += 1
        self.phase_count = 0
        logger.debug(f"Phase {self.phase_index} started at m={self.graph.m}")

    def _check_drift(self) -> None:
        th = self.thresholds
        if self.rebuild_policy == "fixed" or th is None or th.in_window(self.graph.m):
            return
        if self.rebuild_policy == "strict":
            raise RebuildRequired(f"Edge count {self.graph.m} left the window around m_hat={th.m_hat}")
        try:
            thresholds = self.threshold_source(self.graph.m)
        except BootstrapRange:
            logger.info(f"Edge count {self.graph.m} below the feasible range; entering bootstrap")
            self._enter_bootstrap()
            return
        self.rebuild(thresholds)

    # Queries

    def query(self, u: Union[int, VertexRef], v: Union[int, VertexRef]) -> int:
        """
        Number of 3-paths u -> w -> x -> v in the current graph.

        Raises:
            LayerMismatch: If u is not on L1 or v not on L4
        """
        u = vertex_index(u, L1, "u")
        v = vertex_index(v, L4, "v")
        if self.naive is not None:
            total = self.naive.query(u, v)
            self._stats.absorb(self.naive.take_stats())
            return total
        plan = self.plans[(self.classes.get(L1, u), self.classes.get(L4, v))]
        return sum(self._run(method, u, v) for method in plan)

    def query_attributed(self, u: int, v: int) -> List[Tuple[str, frozenset, int]]:
        """Per-method contributions with the fine keys each method covers."""
        cu, cv = self.classes.get(L1, u), self.classes.get(L4, v)
        rows = []
        for method in self.plans[(cu, cv)]:
            keys = frozenset(method_keys(method, self.catalog, cu, cv))
            rows.append((method.label, keys, self._run(method, u, v)))
        return rows

    def _slice(self, matrix: MatrixId, phases, a: int, b: int) -> int:
        if phases == ALL_PHASES:
            return 1 if self.graph.has_edge(matrix, a, b) else 0
        return sum(self.view.value(matrix, p, a, b) for p in phases)

    def _middle(self, layer: int, candidates, allowed) -> List[int]:
        return [v for v in candidates if self.classes.get(layer, v) in allowed]

    def _run(self, method: Method, u: int, v: int) -> int:
        view = self.view
        kind = method.kind
        total = 0
        ops = 0
        if kind == TRIPLE:
            total = self.stores[method.store].get(u, v)
            ops = 1
        elif kind == WARMUP:
            warmup = self.warmups[method.store]
            total = warmup.query(u, v)
            self._stats.absorb(warmup.take_stats())
        elif kind in (VIA_W, VIA_DENSE_W):
            pool = self.dense[L2] if kind == VIA_DENSE_W else view.neighbours(A, 0, u)
            store = self.stores[method.store]
            for w in self._middle(L2, pool, method.cw):
                a = self._slice(A, method.pa, u, w)
                if a:
                    total += a * store.get(w, v)
                ops += 1
        elif kind in (VIA_X, VIA_DENSE_X):
            pool = self.dense[L3] if kind == VIA_DENSE_X else view.neighbours(C, 1, v)
            store = self.stores[method.store]
            for x in self._middle(L3, pool, method.cx):
                c = self._slice(C, method.pc, x, v)
                if c:
                    total += store.get(u, x) * c
                ops += 1
        elif kind == PAIRS:
            ws = self._middle(L2, self.dense[L2] if method.left == DENSE else view.neighbours(A, 0, u), method.cw)
            xs = self._middle(L3, self.dense[L3] if method.right == DENSE else view.neighbours(C, 1, v), method.cx)
            for w in ws:
                a = self._slice(A, method.pa, u, w)
                if not a:
                    ops += 1
                    continue
                for x in xs:
                    b = self._slice(B, method.pb, w, x)
                    if b:
                        total += a * b * self._slice(C, method.pc, x, v)
                    ops += 1
        elif kind == WALK_U:
            for w in self._middle(L2, view.neighbours(A, 0, u), method.cw):
                a = self._slice(A, method.pa, u, w)
                if not a:
                    continue
                for x in self._middle(L3, view.neighbours(B, 0, w), method.cx):
                    total += a * self._slice(B, method.pb, w, x) * self._slice(C, method.pc, x, v)
                    ops += 1
        elif kind == WALK_V:
            for x in self._middle(L3, view.neighbours(C, 1, v), method.cx):
                c = self._slice(C, method.pc, x, v)
                if not c:
                    continue
                for w in self._middle(L2, view.neighbours(B, 1, x), method.cw):
                    total += self._slice(A, method.pa, u, w) * self._slice(B, method.pb, w, x) * c
                    ops += 1
        else:
            raise ValueError(f"Unknown method kind: {kind}")
        self._stats.ops += ops
        return total

    # Introspection

    def check_stores(self) -> List[str]:
        """
        Names of stores that differ from a from-scratch recomputation.

        Stores kept over the next view are reported with a "next:" prefix.
        """
        if self.naive is not None:
            return []
        wrong = []
        for name, spec in self.catalog.items():
            expected, _ = recompute(self.view, spec, class_factor(spec, self.classes))
            if expected != self.stores[name]:
                wrong.append(name)
        for name, store in self.next_stores.items():
            spec = self.catalog[name]
            expected, _ = recompute(self.next_view, spec, class_factor(spec, self.classes))
            if expected != store:
                wrong.append(f"next:{name}")
        return wrong

    def take_stats(self) -> UpdateStats:
        self._stats.job_backlog = sum(job.remaining for job in self.jobs.values() if not job.done)
        stats, self._stats = self._stats, UpdateStats()
        return stats

    def metrics(self) -> Dict[str, Any]:
        return {
            "engine": "main",
            "updates": self.updates,
            "m": self.graph.m,
            "m_hat": self.thresholds.m_hat if self.thresholds else None,
            "bootstrap": self.naive is not None,
            "phase_index": self.phase_index,
            "phase_count": self.phase_count,
            "job_backlog": sum(job.remaining for job in self.jobs.values() if not job.done),
            "transitions_in_flight": len(self.transitions),
            "handover": self.handover is not None,
            "handover_ticks": self.handover.ticks if self.handover is not None else 0,
            "store_sizes": {name: len(store) for name, store in self.stores.items()},
            **self.counters,
        }


def expected_bucket_sums(rows: List[Tuple[str, frozenset, int]], buckets: Dict[Key, int]) -> Dict[str, Tuple[int, int]]:
    """Pair each method's contribution with the bucketed count over its keys."""
    return {label: (value, sum(buckets.get(key, 0) for key in keys)) for label, keys, value in rows}
