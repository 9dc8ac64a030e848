"""
Deferred matrix products stepped under a per-update work budget.

A ProductJob freezes copies of its operands at creation and advances a flat
multiply-accumulate cursor over (i, k, j). Each job_step call is one tick; a job that
is still running when its deadline tick passes raises DeadlineMissed.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

import numpy as np

from core.errors import DeadlineMissed, DimensionMismatch, OverflowDetected
from modules.matmul.matrix import INT64_MAX, CountMatrix, align, product_bound

logger = logging.getLogger(__name__)


@dataclass
class Running:
    """Job still in progress."""

    done_ops: int
    total_ops: int


@dataclass
class Done:
    """Job finished with its exact result."""

    result: CountMatrix


StepResult = Union[Running, Done]


class _Stage:
    """One two-operand product with a MAC cursor."""

    def __init__(self, left: np.ndarray, right: np.ndarray):
        self.left = left
        self.right = right
        self.m, self.k = left.shape
        self.n = right.shape[1]
        self.acc = np.zeros((self.m, self.n), dtype=np.int64)
        self.total = self.m * self.k * self.n
        self.cursor = 0

    @property
    def done(self) -> bool:
        return self.cursor >= self.total

    def advance(self, budget: int) -> int:
        """Run at most budget MACs; returns the number executed."""
        used = 0
        row_work = self.k * self.n
        while used < budget and self.cursor < self.total:
            left_budget = budget - used
            i, rem = divmod(self.cursor, row_work)
            k, j = divmod(rem, self.n)
            if rem == 0 and left_budget >= row_work:
                # whole rows at once
                rows = min(self.m - i, left_budget // row_work)
                self.acc[i:i + rows, :] += self.left[i:i + rows, :] @ self.right
                step = rows * row_work
            elif j == 0 and left_budget >= self.n:
                self.acc[i, :] += self.left[i, k] * self.right[k, :]
                step = self.n
            else:
                step = min(self.n - j, left_budget)
                self.acc[i, j:j + step] += self.left[i, k] * self.right[k, j:j + step]
            self.cursor += step
            used += step
        return used


class ProductJob:
    """
    Budget-stepped product of two or three frozen CountMatrix operands.

    Three operands are multiplied as (a * b) * c in two stages; the second stage starts
    from the finished first-stage matrix.
    """

    def __init__(self, operands: Sequence[CountMatrix], deadline: Optional[int] = None, name: str = "job"):
        if len(operands) not in (2, 3):
            raise DimensionMismatch("A product job needs two or three operands")
        self.name = name
        self.deadline = deadline
        self.ticks = 0
        self.ops = 0
        self.forced = False
        frozen = [op.copy() for op in operands]
        self._rows = frozen[0].rows
        self._row_space = frozen[0].row_space
        self._col_space = frozen[-1].col_space
        left, right, inner = align(frozen[0], frozen[1])
        bound = product_bound(_max(left), _max(right), inner)
        self._stages: List[_Stage] = [_Stage(left, right)]
        self._pending: Optional[np.ndarray] = None
        if len(frozen) == 3:
            middle = CountMatrix(frozen[0].rows, frozen[1].cols, col_space=frozen[1].col_space)
            # restrict b's columns to c's rows once, the second stage reuses the mask
            _, last, second_inner = align(middle, frozen[2])
            keep = np.array([middle.col_index[c] for c in middle.cols if c in frozen[2].row_index], dtype=np.intp)
            self._stages[0] = _Stage(left, right[:, keep])
            self._pending = last
            bound = product_bound(bound, _max(last), second_inner)
            self._cols = frozen[2].cols
            self.total_work = self._stages[0].total + self._stages[0].m * second_inner * last.shape[1]
        else:
            self._cols = frozen[1].cols
            self.total_work = self._stages[0].total
        if bound > INT64_MAX:
            raise OverflowDetected(f"Job {name} product bound {bound} exceeds int64")
        self._result: Optional[CountMatrix] = None
        self._settle()

    @property
    def done(self) -> bool:
        return self._result is not None

    @property
    def result(self) -> Optional[CountMatrix]:
        return self._result

    @property
    def remaining(self) -> int:
        return self.total_work - self.ops

    def _settle(self) -> None:
        """Move to the next stage or finish when the current stage is exhausted."""
        while self._result is None and self._stages[-1].done:
            if self._pending is not None:
                self._stages.append(_Stage(self._stages[-1].acc, self._pending))
                self._pending = None
                continue
            self._result = CountMatrix(self._rows, self._cols, self._stages[-1].acc, self._row_space, self._col_space)

    def advance(self, budget: int) -> int:
        """Run at most budget elementary operations without ticking."""
        used = 0
        while used < budget and self._result is None:
            used += self._stages[-1].advance(budget - used)
            self._settle()
        self.ops += used
        return used

    def finish(self) -> CountMatrix:
        """Complete all remaining work at once."""
        if self._result is None:
            self.forced = True
            self.advance(self.remaining)
        return self._result


def _max(data: np.ndarray) -> int:
    return int(np.abs(data).max()) if data.size else 0


def job_step(job: ProductJob, budget: int) -> StepResult:
    """
    Advance a job by at most budget elementary operations (one tick).

    Raises:
        DeadlineMissed: If the deadline tick is reached while the job still runs
    """
    if job.done:
        return Done(job.result)
    job.advance(max(budget, 0))
    job.ticks += 1
    if job.done:
        return Done(job.result)
    if job.deadline is not None and job.ticks >= job.deadline:
        raise DeadlineMissed(
            f"Job {job.name} still running after {job.ticks} ticks ({job.ops}/{job.total_work} ops)",
            owner=job.name,
        )
    return Running(job.ops, job.total_work)
