"""
Reporting Module for the fourcycle engines.

Handles:
- Per-update bench metrics as CSV
- Constraint reports as CSV
- Verification results (first divergence or success)
"""

import csv
import io
import logging
import os
import sys
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, TextIO

from core.interfaces import ReportingInterface
from utils.common import ensure_dir

logger = logging.getLogger(__name__)

BENCH_HEADER = ["update_index", "wall_ns", "elementary_ops", "job_backlog", "rebuild", "slice_ops", "budget"]
PARAMS_HEADER = ["name", "lhs", "rhs", "slack"]
VERIFY_HEADER = ["status", "update_index", "engine_total", "oracle_total"]


def _cell(value: Any) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    return str(value)


class CsvReporter(ReportingInterface):
    """
    Writes rows under a fixed header, to a file or to a stream.

    Cells are plain decimal strings; booleans become 0/1.
    """

    header: Sequence[str] = ()

    def __init__(self, path: Optional[str] = None, stream: Optional[TextIO] = None):
        """
        Initialize the reporter.

        Args:
            path: Output file; parent directories are created
            stream: Output stream when no path is given (default stdout)
        """
        self.path = path
        self.stream = stream

    def render(self, rows: List[Dict[str, Any]]) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(self.header)
        for row in rows:
            missing = [name for name in self.header if name not in row]
            if missing:
                raise ValueError(f"Row is missing columns {missing}")
            writer.writerow([_cell(row[name]) for name in self.header])
        return buffer.getvalue()

    def write_rows(self, rows: List[Dict[str, Any]]) -> str:
        """
        Write the header and all rows.

        Returns:
            str: Path written, or "<stdout>" / "<stream>"
        """
        text = self.render(rows)
        if self.path:
            directory = os.path.dirname(self.path)
            if directory:
                ensure_dir(directory)
            with open(self.path, "w", newline="") as f:
                f.write(text)
            logger.info(f"Wrote {len(rows)} rows to {self.path}")
            return self.path
        stream = self.stream or sys.stdout
        stream.write(text)
        stream.flush()
        return "<stdout>" if stream is sys.stdout else "<stream>"


class BenchReporter(CsvReporter):
    header = BENCH_HEADER


class ParamsReporter(CsvReporter):
    header = PARAMS_HEADER


class VerifyReporter(CsvReporter):
    header = VERIFY_HEADER


def bench_row(index: int, wall_ns: int, stats) -> Dict[str, Any]:
    """Build one bench row from an update's timing and UpdateStats."""
    return {
        "update_index": index,
        "wall_ns": wall_ns,
        "elementary_ops": stats.ops,
        "job_backlog": stats.job_backlog,
        "rebuild": stats.rebuild,
        "slice_ops": stats.slice_ops,
        "budget": stats.budget,
    }


def summarize_bench(rows: Sequence[Dict[str, Any]]) -> Dict[str, Any]:
    """
    Aggregate bench rows: update count, max and total ops, rebuilds, wall time, the
    largest budgeted slice and the non-rebuild updates whose slice exceeded the budget.
    """
    if not rows:
        return {
            "updates": 0, "max_ops": 0, "total_ops": 0, "rebuilds": 0, "wall_ns": 0, "max_slice_ops": 0, "over_budget": 0,
        }
    return {
        "updates": len(rows),
        "max_ops": max(row["elementary_ops"] for row in rows),
        "total_ops": sum(row["elementary_ops"] for row in rows),
        "rebuilds": sum(1 for row in rows if row["rebuild"]),
        "wall_ns": sum(row["wall_ns"] for row in rows),
        "max_slice_ops": max(row["slice_ops"] for row in rows),
        "over_budget": sum(1 for row in rows if not row["rebuild"] and row["slice_ops"] > row["budget"]),
    }


@dataclass(frozen=True)
class VerifyResult:
    """Outcome of an engine-vs-oracle replay."""

    updates: int
    divergence_index: Optional[int] = None
    engine_total: Optional[int] = None
    oracle_total: Optional[int] = None

    @property
    def ok(self) -> bool:
        return self.divergence_index is None

    def as_row(self) -> Dict[str, Any]:
        if self.ok:
            return {"status": "ok", "update_index": self.updates, "engine_total": "", "oracle_total": ""}
        return {
            "status": "divergence",
            "update_index": self.divergence_index,
            "engine_total": self.engine_total,
            "oracle_total": self.oracle_total,
        }

    def message(self) -> str:
        if self.ok:
            return f"ok: {self.updates} updates agree"
        return (
            f"divergence at update {self.divergence_index}: "
            f"engine={self.engine_total} oracle={self.oracle_total}"
        )
