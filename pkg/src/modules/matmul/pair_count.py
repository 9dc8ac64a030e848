"""
Sparse signed pair counts.

PairCount houses every "X·Y"-style path-count table of the engines: a map from a
(row vertex, column vertex) pair to a signed multiplicity, with zero entries removed.
"""

from typing import Dict, Iterator, Mapping, Tuple


class PairCount:
    """Sparse signed map (row, col) -> int; absent means 0."""

    __slots__ = ("_rows",)

    def __init__(self):
        self._rows: Dict[int, Dict[int, int]] = {}

    def get(self, row: int, col: int) -> int:
        entries = self._rows.get(row)
        if entries is None:
            return 0
        return entries.get(col, 0)

    def row(self, row: int) -> Mapping[int, int]:
        """Read-only view of one row."""
        return self._rows.get(row, {})

    def rows(self) -> Iterator[int]:
        return iter(self._rows)

    def add(self, row: int, col: int, value: int) -> None:
        if not value:
            return
        entries = self._rows.setdefault(row, {})
        updated = entries.get(col, 0) + value
        if updated:
            entries[col] = updated
        else:
            del entries[col]
            if not entries:
                del self._rows[row]

    def add_outer(self, left: Mapping[int, int], right: Mapping[int, int], sign: int = 1) -> int:
        """
        Add sign * left[r] * right[c] for every pair.

        Returns:
            int: Number of entries touched (elementary operations)
        """
        if not sign or not left or not right:
            return 0
        ops = 0
        for r, lv in left.items():
            if not lv:
                continue
            scale = sign * lv
            for c, rv in right.items():
                if rv:
                    self.add(r, c, scale * rv)
                    ops += 1
        return ops

    def merge(self, other: "PairCount", sign: int = 1) -> int:
        """Add sign * other entrywise; returns the number of entries touched."""
        ops = 0
        for (r, c), value in other.items():
            self.add(r, c, sign * value)
            ops += 1
        return ops

    def items(self) -> Iterator[Tuple[Tuple[int, int], int]]:
        for r, entries in self._rows.items():
            for c, value in entries.items():
                yield (r, c), value

    def to_dict(self) -> Dict[Tuple[int, int], int]:
        return dict(self.items())

    def copy(self) -> "PairCount":
        clone = PairCount()
        clone._rows = {r: dict(entries) for r, entries in self._rows.items()}
        return clone

    def clear(self) -> None:
        self._rows.clear()

    def __len__(self) -> int:
        return sum(len(entries) for entries in self._rows.values())

    def __bool__(self) -> bool:
        return bool(self._rows)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PairCount):
            return NotImplemented
        return self._rows == other._rows

    def __repr__(self) -> str:
        return f"PairCount({self.to_dict()})"
