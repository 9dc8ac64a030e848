"""
Undirected simple general graph.
"""

from typing import Dict, Iterator, Set, Tuple

from core.errors import DuplicateInsert, MissingDelete, SelfLoop
from modules.graph.layered import Op
from modules.graph.reduction import GeneralUpdate


class GeneralGraph:
    """Adjacency sets of an undirected simple graph."""

    def __init__(self):
        self.adj: Dict[int, Set[int]] = {}
        self.m = 0

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj.get(u, ())

    def neighbors(self, u: int) -> Set[int]:
        return self.adj.get(u, set())

    def degree(self, u: int) -> int:
        return len(self.adj.get(u, ()))

    def edges(self) -> Iterator[Tuple[int, int]]:
        for u, targets in self.adj.items():
            for v in targets:
                if u < v:
                    yield u, v

    def check(self, update: GeneralUpdate) -> None:
        """
        Validate an update against the current graph.

        Raises:
            SelfLoop: u == v
            DuplicateInsert: Insert of a present edge
            MissingDelete: Delete of an absent edge
        """
        if update.u == update.v:
            raise SelfLoop(f"Self-loop on vertex {update.u}")
        present = self.has_edge(update.u, update.v)
        if update.op is Op.INSERT and present:
            raise DuplicateInsert(f"Edge ({update.u},{update.v}) already present")
        if update.op is Op.DELETE and not present:
            raise MissingDelete(f"Edge ({update.u},{update.v}) not present")

    def apply(self, update: GeneralUpdate) -> int:
        self.check(update)
        u, v = update.u, update.v
        if update.op is Op.INSERT:
            self.adj.setdefault(u, set()).add(v)
            self.adj.setdefault(v, set()).add(u)
            self.m += 1
        else:
            for a, b in ((u, v), (v, u)):
                self.adj[a].discard(b)
                if not self.adj[a]:
                    del self.adj[a]
            self.m -= 1
        return self.m
