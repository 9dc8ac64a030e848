"""
Oracle-backed engines and counters that recount from scratch after every update.
"""

from typing import Any, Dict

from core.interfaces import CycleCounterInterface, LayeredEngineInterface, UpdateStats
from modules.graph.general import GeneralGraph
from modules.graph.layered import LayeredGraph, UpdateEvent
from modules.graph.reduction import GeneralUpdate
from modules.oracle.brute import brute_3paths, brute_4cycles_general, brute_layered_4cycles


class LayeredOracleEngine(LayeredEngineInterface):
    """3-path queries answered by direct enumeration."""

    def __init__(self):
        self.graph = LayeredGraph()

    def apply(self, event: UpdateEvent) -> None:
        self.graph.apply(event)

    def query(self, u: int, v: int) -> int:
        return brute_3paths(self.graph, u, v)

    def take_stats(self) -> UpdateStats:
        return UpdateStats()

    def metrics(self) -> Dict[str, Any]:
        return {"engine": "oracle", "m": self.graph.m}


class GeneralOracleCounter(CycleCounterInterface):
    """Recounts every 4-cycle of the general graph after each update."""

    def __init__(self):
        self.graph = GeneralGraph()
        self._total = 0

    @property
    def total(self) -> int:
        return self._total

    def apply(self, update: GeneralUpdate) -> int:
        self.graph.apply(update)
        self._total = brute_4cycles_general(self.graph.adj)
        return self._total

    def take_stats(self) -> UpdateStats:
        return UpdateStats()

    def metrics(self) -> Dict[str, Any]:
        return {"engine": "oracle", "m": self.graph.m, "total": self._total}


class LayeredOracleCounter(CycleCounterInterface):
    """Recounts every layered 4-cycle after each update."""

    def __init__(self):
        self.graph = LayeredGraph()
        self._total = 0

    @property
    def total(self) -> int:
        return self._total

    def apply(self, event: UpdateEvent) -> int:
        self.graph.apply(event)
        self._total = brute_layered_4cycles(self.graph)
        return self._total

    def take_stats(self) -> UpdateStats:
        return UpdateStats()

    def metrics(self) -> Dict[str, Any]:
        return {"engine": "oracle", "m": self.graph.m, "total": self._total}
