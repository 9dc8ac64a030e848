"""
Baseline engines that maintain all-pairs wedge tables.

NaiveCycleCounter keeps, for every pair of general vertices, the number of 2-paths
between them. An insertion is answered before the table is updated and a deletion
after, so the query never sees the updated edge.
"""

import logging
from typing import Any, Dict, Optional

from core.interfaces import CycleCounterInterface, LayeredEngineInterface, UpdateStats
from modules.graph.general import GeneralGraph
from modules.graph.layered import LayeredGraph, MatrixId, Op, UpdateEvent
from modules.graph.reduction import GeneralUpdate
from modules.matmul.pair_count import PairCount

logger = logging.getLogger(__name__)


class WedgeTable:
    """Common-neighbourhood sizes keyed by unordered vertex pairs."""

    def __init__(self):
        self.pairs = PairCount()

    def get(self, x: int, y: int) -> int:
        return self.pairs.get(min(x, y), max(x, y))

    def add(self, x: int, y: int, value: int) -> None:
        self.pairs.add(min(x, y), max(x, y), value)

    def __len__(self) -> int:
        return len(self.pairs)


class NaiveCycleCounter(CycleCounterInterface):
    """Exact O(n)-per-update 4-cycle counter for general graphs."""

    def __init__(self):
        self.graph = GeneralGraph()
        self.wedges = WedgeTable()
        self._total = 0
        self._stats = UpdateStats()
        self.updates = 0
        logger.info("Naive general counter initialized")

    @property
    def total(self) -> int:
        return self._total

    def _cycles_through(self, u: int, v: int) -> int:
        delta = 0
        for w in self.graph.neighbors(u):
            delta += self.wedges.get(w, v)
        self._stats.ops += self.graph.degree(u)
        return delta

    def _touch(self, u: int, v: int, sign: int) -> None:
        # u is the wedge centre for pairs (v, w) and v for pairs (u, x)
        for w in self.graph.neighbors(u):
            if w != v:
                self.wedges.add(v, w, sign)
                self._stats.ops += 1
        for x in self.graph.neighbors(v):
            if x != u:
                self.wedges.add(u, x, sign)
                self._stats.ops += 1

    def apply(self, update: GeneralUpdate) -> int:
        self.graph.check(update)
        if update.op is Op.INSERT:
            delta = self._cycles_through(update.u, update.v)
            self._touch(update.u, update.v, 1)
            self.graph.apply(update)
            self._total += delta
        else:
            self.graph.apply(update)
            self._touch(update.u, update.v, -1)
            delta = self._cycles_through(update.u, update.v)
            self._total -= delta
        self.updates += 1
        return self._total

    def take_stats(self) -> UpdateStats:
        stats, self._stats = self._stats, UpdateStats()
        return stats

    def metrics(self) -> Dict[str, Any]:
        return {
            "engine": "naive",
            "updates": self.updates,
            "m": self.graph.m,
            "wedge_entries": len(self.wedges),
        }


class LayeredNaiveEngine(LayeredEngineInterface):
    """
    Layered baseline keeping W = B * C.

    query(u, v) sums W[w, v] over the A-neighbours w of u. The graph may be shared
    with an owner that applies events itself and calls absorb afterwards.
    """

    def __init__(self, graph: Optional[LayeredGraph] = None):
        self.graph = graph if graph is not None else LayeredGraph()
        self.table = PairCount()
        self._stats = UpdateStats()
        if graph is not None:
            self.rebuild_table()

    def rebuild_table(self) -> None:
        """Recompute W from the graph."""
        self.table = PairCount()
        for w, xs in self.graph.fwd[MatrixId.B].items():
            for x in xs:
                for v in self.graph.out(MatrixId.C, x):
                    self.table.add(w, v, 1)
                    self._stats.ops += 1

    def absorb(self, event: UpdateEvent) -> None:
        """Update W for an event already applied to the graph."""
        sign = event.sign
        for a, b in event.pairs():
            if event.matrix is MatrixId.B:
                for v in self.graph.out(MatrixId.C, b):
                    self.table.add(a, v, sign)
                    self._stats.ops += 1
            elif event.matrix is MatrixId.C:
                for w in self.graph.inc(MatrixId.B, a):
                    self.table.add(w, b, sign)
                    self._stats.ops += 1

    def apply(self, event: UpdateEvent) -> None:
        self.graph.apply(event)
        self.absorb(event)

    def query(self, u: int, v: int) -> int:
        total = 0
        for w in self.graph.out(MatrixId.A, u):
            total += self.table.get(w, v)
        self._stats.ops += len(self.graph.out(MatrixId.A, u))
        return total

    def take_stats(self) -> UpdateStats:
        stats, self._stats = self._stats, UpdateStats()
        return stats

    def metrics(self) -> Dict[str, Any]:
        return {"engine": "naive-layered", "m": self.graph.m, "wedge_entries": len(self.table)}
