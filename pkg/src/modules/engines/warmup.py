"""
Warm-up engine: A and C frozen, updates in B, queries in D.

B updates are grouped into chunks of chunk_size events. Rows of high and medium L1
vertices (and columns of high and medium L4 vertices) are maintained on the fly per
chunk; the remaining chunk products are computed by ProductJobs that run while the
next chunk fills and are folded into the B_{<i} stores when it is sealed. Queries scan
the edges of the sealed and current chunks directly and read the folded part from the
stores.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Set, Tuple, Union

from core.errors import BootstrapRange, DeadlineMissed, DuplicateInsert, MissingDelete, WarmupViolation
from core.interfaces import CycleCounterInterface, LayeredEngineInterface, UpdateStats
from modules.engines.naive import LayeredNaiveEngine
from modules.graph.counter import FourCopyCounter
from modules.graph.layered import L1, L4, LayeredGraph, MatrixId, Op, UpdateEvent, VertexRef, vertex_index
from modules.matmul.jobs import ProductJob, job_step
from modules.matmul.matrix import CountMatrix, multiply
from modules.matmul.pair_count import PairCount
from modules.params.thresholds import Thresholds

logger = logging.getLogger(__name__)

LABEL_PAIRS = ("DD", "SS", "DS", "SD")

# folded B_{<i} stores, named after the product they hold
STORE_NAMES = (
    "ab_h", "abc_hh", "bc_h",
    "ab_m", "bc_m",
    "ab_l_dd", "ab_l_ss", "ab_l_sd",
    "bc_dd_l", "bc_ss_l", "bc_ds_l",
)

# chunk jobs: store name -> (A^{L*} on the left or C^{*L} on the right, label pair)
LOW_JOBS = {
    "ab_l_dd": ("left", "DD"),
    "ab_l_ss": ("left", "SS"),
    "ab_l_sd": ("left", "SD"),
    "bc_dd_l": ("right", "DD"),
    "bc_ss_l": ("right", "SS"),
    "bc_ds_l": ("right", "DS"),
}


@dataclass
class ChunkBuffer:
    """
    Signed B events of one chunk.

    Degrees count events, not net edges, so a deleted-then-reinserted edge weighs twice.
    Labels and parts are fixed when the chunk is sealed.
    """

    edges: List[Tuple[int, int, int]] = field(default_factory=list)
    deg2: Counter = field(default_factory=Counter)
    deg3: Counter = field(default_factory=Counter)
    ab_h: PairCount = field(default_factory=PairCount)
    bc_h: PairCount = field(default_factory=PairCount)
    ab_m: PairCount = field(default_factory=PairCount)
    bc_m: PairCount = field(default_factory=PairCount)
    labels2: Dict[int, str] = field(default_factory=dict)
    labels3: Dict[int, str] = field(default_factory=dict)
    parts: Dict[str, PairCount] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.edges)

    def record(self, w: int, x: int, sign: int) -> None:
        self.edges.append((w, x, sign))
        self.deg2[w] += 1
        self.deg3[x] += 1

    def seal(self, chunk_sparse: int) -> None:
        """Fix S/D labels and split the net edges into the four label pairs."""
        self.labels2 = {w: "S" if d <= chunk_sparse else "D" for w, d in self.deg2.items()}
        self.labels3 = {x: "S" if d <= chunk_sparse else "D" for x, d in self.deg3.items()}
        self.parts = {pair: PairCount() for pair in LABEL_PAIRS}
        for w, x, sign in self.edges:
            self.parts[self.labels2[w] + self.labels3[x]].add(w, x, sign)


class WarmupEngine(LayeredEngineInterface):
    """
    3-path counts through frozen A and C and a dynamic B.

    Args:
        frozen: Graph whose A and C edges are copied and never change
        thresholds: Thresholds; warm-up classes use warmup_classes
        strict: Raise DeadlineMissed for late chunk jobs instead of forcing them
        backend: matmul backend for expected_stores
    """

    def __init__(self, frozen: LayeredGraph, thresholds: Thresholds, strict: bool = True, backend: str = "blocked"):
        self.thresholds = thresholds
        self.strict = strict
        self.backend = backend
        self.a_out: Dict[int, Set[int]] = {u: set(ws) for u, ws in frozen.fwd[MatrixId.A].items()}
        self.a_in: Dict[int, Set[int]] = {w: set(us) for w, us in frozen.bwd[MatrixId.A].items()}
        self.c_out: Dict[int, Set[int]] = {x: set(vs) for x, vs in frozen.fwd[MatrixId.C].items()}
        self.c_in: Dict[int, Set[int]] = {v: set(xs) for v, xs in frozen.bwd[MatrixId.C].items()}

        medium, high = thresholds.warmup_classes
        self.class1 = {u: _warmup_class(len(ws), medium, high) for u, ws in self.a_out.items()}
        self.class4 = {v: _warmup_class(len(xs), medium, high) for v, xs in self.c_in.items()}
        self.high1 = sorted(u for u, c in self.class1.items() if c == "H")
        self.medium1 = sorted(u for u, c in self.class1.items() if c == "M")
        self.high4 = sorted(v for v, c in self.class4.items() if c == "H")
        self.medium4 = sorted(v for v, c in self.class4.items() if c == "M")
        low1 = {u for u, c in self.class1.items() if c == "L"}
        self._a_low = CountMatrix.from_adjacency(self.a_out, rows=low1, row_space="L1", col_space="L2")
        self._c_high = CountMatrix.from_adjacency(self.c_out, cols=set(self.high4), row_space="L3", col_space="L4")
        self._c_low = CountMatrix.from_adjacency(
            self.c_out, cols={v for v, c in self.class4.items() if c == "L"}, row_space="L3", col_space="L4"
        )

        self.stores: Dict[str, PairCount] = {name: PairCount() for name in STORE_NAMES}
        self.folded_b: Dict[str, PairCount] = {pair: PairCount() for pair in LABEL_PAIRS}
        # net signed B multiplicity of every pair seen so far
        self.net_b = PairCount()
        self.current = ChunkBuffer()
        self.sealed: Optional[ChunkBuffer] = None
        self.jobs: Dict[str, ProductJob] = {}

        self.updates = 0
        self.chunks_sealed = 0
        self.forced_jobs = 0
        self._stats = UpdateStats()
        logger.debug(
            f"Warm-up engine: H1={len(self.high1)} M1={len(self.medium1)} "
            f"H4={len(self.high4)} M4={len(self.medium4)} chunk_size={thresholds.chunk_size}"
        )

    # Updates

    def apply(self, event: UpdateEvent) -> None:
        """
        Apply a layered update; B starts empty and D updates are ignored.

        Raises:
            WarmupViolation: For A and C updates
            DuplicateInsert, MissingDelete: Invalid B update
        """
        if event.matrix in (MatrixId.A, MatrixId.C):
            raise WarmupViolation(f"A and C are frozen in the warm-up engine, got {event}")
        if event.matrix is not MatrixId.B:
            return
        for w, x in event.pairs():
            present = self.net_b.get(w, x)
            if event.op is Op.INSERT and present:
                raise DuplicateInsert(f"B edge ({w}, {x}) already present")
            if event.op is Op.DELETE and present != 1:
                raise MissingDelete(f"B edge ({w}, {x}) not present")
        for w, x in event.pairs():
            self.apply_b(w, x, event.sign)

    def apply_b(self, w: int, x: int, sign: int) -> None:
        """
        Record a signed B edge, update the on-the-fly chunk rows, step the chunk jobs and
        seal the chunk when it is full.

        Raises:
            DeadlineMissed: If strict and a chunk job is still running at its fold point
        """
        chunk = self.current
        chunk.record(w, x, sign)
        self.net_b.add(w, x, sign)
        ops = 1
        for u in self.high1:
            if w in self.a_out[u]:
                chunk.ab_h.add(u, x, sign)
            ops += 1
        for u in self.medium1:
            if w in self.a_out[u]:
                chunk.ab_m.add(u, x, sign)
            ops += 1
        for v in self.high4:
            if x in self.c_in[v]:
                chunk.bc_h.add(w, v, sign)
            ops += 1
        for v in self.medium4:
            if x in self.c_in[v]:
                chunk.bc_m.add(w, v, sign)
            ops += 1
        self._stats.ops += ops
        self.updates += 1
        self._step_jobs()
        if len(chunk) >= self.thresholds.chunk_size:
            self._seal()

    def _step_jobs(self) -> None:
        budget = self.thresholds.per_update_budget
        used = 0
        for name, job in self.jobs.items():
            if job.done:
                continue
            before = job.ops
            try:
                job_step(job, max(budget - used, 0))
            except DeadlineMissed:
                if self.strict:
                    raise
                logger.warning(f"Chunk job {name} missed its deadline; forcing completion")
                job.finish()
                self.forced_jobs += 1
            used += job.ops - before
        self._stats.record_slice(used, budget)

    def _seal(self) -> None:
        for name, job in self.jobs.items():
            if not job.done:
                if self.strict:
                    raise DeadlineMissed(f"Chunk job {name} unfinished at fold point", owner=name)
                logger.warning(f"Chunk job {name} unfinished at fold point; forcing completion")
                before = job.ops
                job.finish()
                self._stats.record_slice(job.ops - before, self.thresholds.per_update_budget)
                self.forced_jobs += 1
        if self.sealed is not None:
            self._fold(self.sealed)
        chunk = self.current
        chunk.seal(self.thresholds.chunk_sparse)
        self.sealed = chunk
        self.current = ChunkBuffer()
        self.chunks_sealed += 1
        self.jobs = self._chunk_jobs(chunk)
        logger.debug(f"Sealed chunk {self.chunks_sealed} with {len(chunk)} events, {len(self.jobs)} jobs")

    def _chunk_jobs(self, chunk: ChunkBuffer) -> Dict[str, ProductJob]:
        deadline = self.thresholds.chunk_size
        jobs = {
            "abc_hh": ProductJob(
                [CountMatrix.from_pairs(chunk.ab_h, "L1", "L3"), self._c_high], deadline=deadline, name="abc_hh"
            )
        }
        for name, (side, pair) in LOW_JOBS.items():
            part = CountMatrix.from_pairs(chunk.parts[pair], "L2", "L3")
            operands = [self._a_low, part] if side == "left" else [part, self._c_low]
            jobs[name] = ProductJob(operands, deadline=deadline, name=name)
        return jobs

    def _fold(self, chunk: ChunkBuffer) -> None:
        ops = 0
        ops += self.stores["ab_h"].merge(chunk.ab_h)
        ops += self.stores["bc_h"].merge(chunk.bc_h)
        ops += self.stores["ab_m"].merge(chunk.ab_m)
        ops += self.stores["bc_m"].merge(chunk.bc_m)
        for name, job in self.jobs.items():
            ops += self.stores[name].merge(job.result.to_pair_count())
        for pair, part in chunk.parts.items():
            self.folded_b[pair].merge(part)
        self._stats.ops += ops

    # Queries

    def query(self, u: Union[int, VertexRef], v: Union[int, VertexRef]) -> int:
        """
        Number of 3-paths u -> w -> x -> v over frozen A, C and all B updates so far.

        Raises:
            LayerMismatch: If u is not on L1 or v not on L4
        """
        u = vertex_index(u, L1, "u")
        v = vertex_index(v, L4, "v")
        left = self.a_out.get(u, set())
        right = self.c_in.get(v, set())
        total = 0
        ops = 0
        # lazy evaluation of the unfolded chunks
        for chunk in (self.sealed, self.current):
            if chunk is None:
                continue
            for w, x, sign in chunk.edges:
                if w in left and x in right:
                    total += sign
            ops += len(chunk)
        cu = self.class1.get(u, "L")
        cv = self.class4.get(v, "L")
        stores = self.stores
        if cu == "H" and cv == "H":
            total += stores["abc_hh"].get(u, v)
            ops += 1
        elif cu in ("H", "M") and cv in ("M", "L"):
            row = stores["ab_h" if cu == "H" else "ab_m"].row(u)
            total += sum(row.get(x, 0) for x in right)
            ops += len(right)
        elif cv in ("H", "M"):
            store = stores["bc_h" if cv == "H" else "bc_m"]
            total += sum(store.get(w, v) for w in left)
            ops += len(left)
        else:
            for name in ("ab_l_dd", "ab_l_ss", "ab_l_sd"):
                row = stores[name].row(u)
                total += sum(row.get(x, 0) for x in right)
            total += sum(stores["bc_ds_l"].get(w, v) for w in left)
            ops += 3 * len(right) + len(left)
        self._stats.ops += ops
        return total

    # Introspection

    def take_stats(self) -> UpdateStats:
        self._stats.job_backlog = sum(job.remaining for job in self.jobs.values() if not job.done)
        stats, self._stats = self._stats, UpdateStats()
        return stats

    def metrics(self) -> Dict[str, Any]:
        return {
            "engine": "warmup",
            "updates": self.updates,
            "chunks_sealed": self.chunks_sealed,
            "job_backlog": sum(job.remaining for job in self.jobs.values() if not job.done),
            "forced_jobs": self.forced_jobs,
            "store_sizes": {name: len(store) for name, store in self.stores.items()},
        }

    def store_snapshot(self) -> Dict[str, PairCount]:
        return {name: store.copy() for name, store in self.stores.items()}

    def expected_stores(self) -> Dict[str, PairCount]:
        """Every folded store recomputed from scratch over the folded chunks."""
        folded_all = PairCount()
        for part in self.folded_b.values():
            folded_all.merge(part)
        b_all = CountMatrix.from_pairs(folded_all, "L2", "L3")
        a_high = CountMatrix.from_adjacency(self.a_out, rows=set(self.high1), row_space="L1", col_space="L2")
        a_medium = CountMatrix.from_adjacency(self.a_out, rows=set(self.medium1), row_space="L1", col_space="L2")
        c_medium = CountMatrix.from_adjacency(self.c_out, cols=set(self.medium4), row_space="L3", col_space="L4")

        def product(*operands: CountMatrix) -> PairCount:
            result = operands[0]
            for operand in operands[1:]:
                result = multiply(result, operand, backend=self.backend)
            return result.to_pair_count()

        expected = {
            "ab_h": product(a_high, b_all),
            "abc_hh": product(a_high, b_all, self._c_high),
            "bc_h": product(b_all, self._c_high),
            "ab_m": product(a_medium, b_all),
            "bc_m": product(b_all, c_medium),
        }
        for name, (side, pair) in LOW_JOBS.items():
            part = CountMatrix.from_pairs(self.folded_b[pair], "L2", "L3")
            expected[name] = product(self._a_low, part) if side == "left" else product(part, self._c_low)
        return expected


def _warmup_class(degree: int, medium: int, high: int) -> str:
    if degree >= high:
        return "H"
    if degree >= medium:
        return "M"
    return "L"


class WarmupLayeredCounter(CycleCounterInterface):
    """
    Layered 4-cycle counter on two warm-up engines.

    A and C events must form a prefix of the stream. The first B or D event freezes them;
    copy 0 then receives B updates and answers D events, copy 2 (A and C swapped) receives
    D updates and answers B events.

    Args:
        thresholds: Explicit thresholds, or None to derive them from the frozen edge count
        threshold_source: Callable m -> Thresholds used when thresholds is None; may raise
            BootstrapRange, in which case the counter falls back to the naive layered engine
        strict: Passed to both warm-up engines
    """

    def __init__(self, thresholds: Optional[Thresholds] = None, threshold_source=None, strict: bool = True):
        self.thresholds = thresholds
        self.threshold_source = threshold_source
        self.strict = strict
        self.graph = LayeredGraph()
        self.prefix: List[UpdateEvent] = []
        self.copies: Optional[List[WarmupEngine]] = None
        self.fallback: Optional[CycleCounterInterface] = None
        self._total = 0
        self.updates = 0
        logger.info("Warm-up layered counter initialized")

    @property
    def total(self) -> int:
        return self._total

    @property
    def frozen(self) -> bool:
        return self.copies is not None or self.fallback is not None

    def _freeze(self) -> None:
        thresholds = self.thresholds
        if thresholds is None:
            try:
                thresholds = self.threshold_source(max(self.graph.m, 1))
            except BootstrapRange as e:
                logger.info(f"Warm-up thresholds unavailable ({e}); using the naive layered engine")
                self.fallback = FourCopyCounter(LayeredNaiveEngine)
                for event in self.prefix:
                    self.fallback.apply(event)
                return
        swapped = LayeredGraph()
        for a, b in self.graph.edges(MatrixId.C):
            swapped.apply(UpdateEvent(Op.INSERT, MatrixId.A, a, b))
        for a, b in self.graph.edges(MatrixId.A):
            swapped.apply(UpdateEvent(Op.INSERT, MatrixId.C, a, b))
        self.copies = [
            WarmupEngine(self.graph, thresholds, strict=self.strict),
            WarmupEngine(swapped, thresholds, strict=self.strict),
        ]
        logger.info(f"Froze A and C with {self.graph.m} edges")

    def apply(self, event: UpdateEvent) -> int:
        if event.matrix in (MatrixId.A, MatrixId.C):
            if self.frozen:
                raise WarmupViolation(f"{event.matrix.name} event after the frozen prefix: {event}")
            self.graph.apply(event)
            self.prefix.append(event)
            self.updates += 1
            return self._total
        if not self.frozen:
            self._freeze()
        if self.fallback is not None:
            self._total = self.fallback.apply(event)
            self.updates += 1
            return self._total
        self.graph.apply(event)
        direct, swapped = self.copies
        new = 0
        if event.matrix is MatrixId.B:
            # a B edge (w, x) closes paths x -> v -> u -> w in the swapped copy
            for w, x in event.pairs():
                new += swapped.query(x, w)
            for w, x in event.pairs():
                direct.apply_b(w, x, event.sign)
        else:
            for a, b in event.pairs():
                new += direct.query(b, a)
            for a, b in event.pairs():
                swapped.apply_b(a, b, event.sign)
        self._total += event.sign * new
        self.updates += 1
        return self._total

    def take_stats(self) -> UpdateStats:
        if self.fallback is not None:
            return self.fallback.take_stats()
        stats = UpdateStats()
        for engine in self.copies or ():
            stats.absorb(engine.take_stats())
        return stats

    def metrics(self) -> Dict[str, Any]:
        if self.fallback is not None:
            return {"engine": "warmup", "fallback": self.fallback.metrics(), "total": self._total}
        return {
            "engine": "warmup",
            "updates": self.updates,
            "total": self._total,
            "copies": [engine.metrics() for engine in self.copies or ()],
        }

