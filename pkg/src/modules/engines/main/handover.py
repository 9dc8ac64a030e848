"""
Budgeted hand-over between phases.

When a phase ends its products are complete but still filtered by the classes the
products started with, and in-flight transitions hold their phase-product deltas in
the live view only. The hand-over installs the products entry by entry, replays the
class flips completed since the products started and restages the transitions' items
in the next view, at most per_update_budget writes per update. Queries read the live
view until the engine switches views on completion.
"""

import logging
from collections import deque
from typing import Deque, Dict, List, Mapping, Optional, Tuple, Union

from core.errors import DeadlineMissed
from modules.engines.main.stores import (
    ClassMap,
    OuterWrite,
    PhaseView,
    StoreSpec,
    TableWrite,
    class_factor,
    flip_write,
)
from modules.engines.main.transitions import Transition, restage_writes
from modules.matmul.matrix import CountMatrix
from modules.matmul.pair_count import PairCount

logger = logging.getLogger(__name__)

Flip = Tuple[int, int, str, str]
Write = Union[OuterWrite, TableWrite]


class HandOver:
    """
    Pending switch to the next phase view.

    Args:
        results: Finished phase products by store name
        stores: Store catalog
        job_classes: Classes the products were filtered with; advanced flip by flip
        flips: Class flips since the products started, (layer, v, old, new); the engine
            keeps appending to it while the hand-over runs
        next_view: View the installed stores are expressed in
        classes: Live classes, read when a transition item is restaged
        transitions: Transitions in flight when the hand-over opened
        deadline: Updates allowed before the hand-over is late
    """

    def __init__(
        self,
        results: Mapping[str, CountMatrix],
        stores: Mapping[str, StoreSpec],
        job_classes: ClassMap,
        flips: List[Flip],
        next_view: PhaseView,
        classes: ClassMap,
        transitions: List[Transition],
        deadline: int,
    ):
        self.stores = stores
        self.job_classes = job_classes
        self.flips = flips
        self.next_view = next_view
        self.classes = classes
        self.deadline = deadline
        self.tables: Dict[str, PairCount] = {name: PairCount() for name in results}
        self._writes: Deque[Tuple[Optional[Transition], Write]] = deque(
            (None, TableWrite(self.tables[name], result.entries())) for name, result in results.items()
        )
        self._replayed = 0
        self._queue: Deque[Transition] = deque(t for t in transitions if t.rebase_end)
        self._item = 0
        self.ticks = 0
        self.ops = 0

    @property
    def done(self) -> bool:
        return not self._writes and self._replayed >= len(self.flips) and not self._queue

    def _refill(self) -> bool:
        """Queue the writes of the next flip or restaged item; False when nothing is left."""
        if self._replayed < len(self.flips):
            layer, v, old, new = self.flips[self._replayed]
            self._replayed += 1
            for name, table in self.tables.items():
                spec = self.stores[name]
                pos = spec.position(layer)
                if pos is None:
                    continue
                coef = spec.admits(pos, new) - spec.admits(pos, old)
                write = flip_write(table, self.next_view, spec, class_factor(spec, self.job_classes), pos, v, coef)
                if write is not None:
                    self._writes.append((None, write))
            self.job_classes.set(layer, v, new)
            return True
        while self._queue:
            t = self._queue[0]
            if t.closed or self._item >= t.rebase_end:
                self._queue.popleft()
                self._item = 0
                continue
            y = t.worklist[self._item]
            self._item += 1
            for write in restage_writes(t, y, self.stores, self.next_view, self.classes):
                self._writes.append((t, write))
            return True
        return False

    def advance(self, budget: float) -> int:
        """
        Do at most budget writes; queueing a flip or an item costs one.

        Returns:
            int: Work done
        """
        used = 0
        while used < budget:
            if self._writes:
                owner, write = self._writes[0]
                if owner is None or not owner.closed:
                    used += write.advance(budget - used)
                    if not write.done:
                        continue
                self._writes.popleft()
                continue
            if not self._refill():
                break
            used += 1
        self.ops += used
        return used

    def tick(self, budget: int, strict: bool) -> Tuple[int, bool]:
        """
        One update's slice.

        Returns:
            tuple: (work done, whether the deadline forced the remainder)

        Raises:
            DeadlineMissed: If strict and the hand-over outlives its deadline
        """
        self.ticks += 1
        used = self.advance(budget)
        if self.done or self.ticks < self.deadline:
            return used, False
        if strict:
            raise DeadlineMissed(f"Phase hand-over unfinished after {self.ticks} updates", owner="handover")
        logger.warning("Phase hand-over missed its deadline; forcing completion")
        return used + self.advance(float("inf")), True
