"""
Core interfaces for the fourcycle counting engines.

This module defines the abstract base classes the engines, counters and reporters
implement, so the CLI and the container can swap implementations freely.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, List


@dataclass
class UpdateStats:
    """
    Work done by the most recent update.

    slice_ops is the largest slice a single budgeted task advanced during the update
    and budget the per-update budget it ran under; both combine by maximum.
    """

    ops: int = 0
    job_backlog: int = 0
    rebuild: bool = False
    slice_ops: int = 0
    budget: int = 0

    def absorb(self, other: "UpdateStats") -> None:
        self.ops += other.ops
        self.job_backlog += other.job_backlog
        self.rebuild = self.rebuild or other.rebuild
        self.slice_ops = max(self.slice_ops, other.slice_ops)
        self.budget = max(self.budget, other.budget)

    def record_slice(self, used: int, budget: int) -> None:
        """Count a budgeted slice of work."""
        self.ops += used
        self.slice_ops = max(self.slice_ops, used)
        self.budget = max(self.budget, budget)


class LayeredEngineInterface(ABC):
    """Interface for engines answering 3-path queries on a layered graph."""

    @abstractmethod
    def apply(self, event: Any) -> None:
        """Apply a layered update event."""
        pass

    @abstractmethod
    def query(self, u: int, v: int) -> int:
        """Number of 3-paths from u in L1 to v in L4 through A, B and C."""
        pass

    @abstractmethod
    def take_stats(self) -> UpdateStats:
        """Return and reset the work counters of the last update."""
        pass

    @abstractmethod
    def metrics(self) -> Dict[str, Any]:
        """Cumulative engine metrics."""
        pass


class CycleCounterInterface(ABC):
    """Interface for running 4-cycle totals over an update stream."""

    @abstractmethod
    def apply(self, update: Any) -> int:
        """Apply one stream update and return the new total."""
        pass

    @property
    @abstractmethod
    def total(self) -> int:
        """Current 4-cycle count."""
        pass

    @abstractmethod
    def take_stats(self) -> UpdateStats:
        """Return and reset the work counters of the last update."""
        pass

    @abstractmethod
    def metrics(self) -> Dict[str, Any]:
        """Cumulative counter metrics."""
        pass


class ReportingInterface(ABC):
    """Interface for writing run results."""

    @abstractmethod
    def write_rows(self, rows: List[Dict[str, Any]]) -> str:
        """Write result rows and return the destination."""
        pass
