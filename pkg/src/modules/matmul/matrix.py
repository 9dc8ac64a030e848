"""
Dense signed-integer count matrices and exact products.

A CountMatrix carries numpy int64 entries plus row/column index maps from vertex id
to dense position. Products align the left operand's columns with the right
operand's rows on the shared vertex ids; everything outside the intersection counts
as zero.
"""

import logging
from typing import Iterable, List, Mapping, Optional, Sequence, Set, Tuple, Union

import numpy as np

from core.errors import DimensionMismatch, OverflowDetected
from modules.matmul.pair_count import PairCount

logger = logging.getLogger(__name__)

INT64_MAX = 2**63 - 1

Neighbors = Union[Iterable[int], Mapping[int, int]]


class CountMatrix:
    """Signed integer matrix indexed by vertex ids."""

    def __init__(
        self,
        rows: Sequence[int],
        cols: Sequence[int],
        data: Optional[np.ndarray] = None,
        row_space: Optional[str] = None,
        col_space: Optional[str] = None,
    ):
        self.rows: List[int] = list(rows)
        self.cols: List[int] = list(cols)
        self.row_index = {v: i for i, v in enumerate(self.rows)}
        self.col_index = {v: j for j, v in enumerate(self.cols)}
        if len(self.row_index) != len(self.rows) or len(self.col_index) != len(self.cols):
            raise DimensionMismatch("Duplicate vertex ids in matrix index")
        if data is None:
            data = np.zeros((len(self.rows), len(self.cols)), dtype=np.int64)
        if data.shape != (len(self.rows), len(self.cols)):
            raise DimensionMismatch(f"Data shape {data.shape} does not match index sizes")
        self.data = data.astype(np.int64, copy=False)
        self.row_space = row_space
        self.col_space = col_space

    @classmethod
    def from_adjacency(
        cls,
        adj: Mapping[int, Neighbors],
        rows: Optional[Set[int]] = None,
        cols: Optional[Set[int]] = None,
        row_space: Optional[str] = None,
        col_space: Optional[str] = None,
    ) -> "CountMatrix":
        """
        Build from an adjacency map, optionally restricted to row and column sets.

        Neighbor containers may be sets (weight 1) or maps to signed weights. Rows and
        columns without a nonzero entry are left out.
        """
        entries = {}
        for r, nbrs in adj.items():
            if rows is not None and r not in rows:
                continue
            weighted = nbrs.items() if isinstance(nbrs, Mapping) else ((c, 1) for c in nbrs)
            for c, value in weighted:
                if value and (cols is None or c in cols):
                    entries[(r, c)] = value
        return cls._from_entries(entries, row_space, col_space)

    @classmethod
    def from_pairs(cls, pairs: PairCount, row_space: Optional[str] = None, col_space: Optional[str] = None) -> "CountMatrix":
        return cls._from_entries(pairs.to_dict(), row_space, col_space)

    @classmethod
    def _from_entries(cls, entries, row_space, col_space) -> "CountMatrix":
        rows = sorted({r for r, _ in entries})
        cols = sorted({c for _, c in entries})
        matrix = cls(rows, cols, row_space=row_space, col_space=col_space)
        for (r, c), value in entries.items():
            matrix.data[matrix.row_index[r], matrix.col_index[c]] = value
        return matrix

    @property
    def shape(self):
        return self.data.shape

    def get(self, row: int, col: int) -> int:
        """Entry lookup; unmapped vertices read as 0."""
        i = self.row_index.get(row)
        j = self.col_index.get(col)
        if i is None or j is None:
            return 0
        return int(self.data[i, j])

    def max_abs(self) -> int:
        if self.data.size == 0:
            return 0
        return int(np.abs(self.data).max())

    def entries(self) -> List[Tuple[int, int, int]]:
        """Nonzero entries as (row vertex, column vertex, value), row-major."""
        return [(self.rows[i], self.cols[j], int(self.data[i, j])) for i, j in zip(*np.nonzero(self.data))]

    def to_pair_count(self) -> PairCount:
        pairs = PairCount()
        for r, c, value in self.entries():
            pairs.add(r, c, value)
        return pairs

    def copy(self) -> "CountMatrix":
        return CountMatrix(self.rows, self.cols, self.data.copy(), self.row_space, self.col_space)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CountMatrix):
            return NotImplemented
        return self.to_pair_count() == other.to_pair_count()

    def __repr__(self) -> str:
        return f"CountMatrix({len(self.rows)}x{len(self.cols)}, nnz={int(np.count_nonzero(self.data))})"


def submatrix(a: CountMatrix, rows: Optional[Set[int]] = None, cols: Optional[Set[int]] = None) -> CountMatrix:
    """
    Restrict to row and column vertex sets (None keeps all) and drop zero rows/columns.
    """
    keep_rows = [r for r in a.rows if rows is None or r in rows]
    keep_cols = [c for c in a.cols if cols is None or c in cols]
    if not keep_rows or not keep_cols:
        return CountMatrix([], [], row_space=a.row_space, col_space=a.col_space)
    block = a.data[np.ix_([a.row_index[r] for r in keep_rows], [a.col_index[c] for c in keep_cols])]
    row_mask = np.any(block != 0, axis=1)
    col_mask = np.any(block != 0, axis=0)
    return CountMatrix(
        [r for r, keep in zip(keep_rows, row_mask) if keep],
        [c for c, keep in zip(keep_cols, col_mask) if keep],
        block[np.ix_(row_mask, col_mask)],
        a.row_space,
        a.col_space,
    )


def align(a: CountMatrix, b: CountMatrix):
    """
    Restrict a's columns and b's rows to their shared vertex ids, in a's order.

    Raises:
        DimensionMismatch: If both operands declare different index spaces
    """
    if a.col_space and b.row_space and a.col_space != b.row_space:
        raise DimensionMismatch(f"Cannot multiply over {a.col_space} and {b.row_space}")
    shared = [k for k in a.cols if k in b.row_index]
    left = a.data[:, np.array([a.col_index[k] for k in shared], dtype=np.intp)]
    right = b.data[np.array([b.row_index[k] for k in shared], dtype=np.intp), :]
    return left, right, len(shared)


def product_bound(left_max: int, right_max: int, inner: int) -> int:
    """Largest possible |entry| of a product, computed with Python integers."""
    return left_max * right_max * inner


def _max_abs(data: np.ndarray) -> int:
    return int(np.abs(data).max()) if data.size else 0


def multiply(
    a: CountMatrix,
    b: CountMatrix,
    backend: str = "blocked",
    block_size: int = 64,
    strassen_cutoff: int = 32,
) -> CountMatrix:
    """
    Exact signed product; entry (x, y) = sum over shared w of a[x, w] * b[w, y].

    Raises:
        OverflowDetected: If the product could leave the int64 range
        DimensionMismatch: If the operands declare incompatible index spaces
    """
    left, right, inner = align(a, b)
    bound = product_bound(_max_abs(left), _max_abs(right), inner)
    if bound > INT64_MAX:
        raise OverflowDetected(f"Product bound {bound} exceeds int64")
    if backend == "schoolbook":
        data = schoolbook(left, right)
    elif backend == "strassen":
        data = strassen_product(left, right, strassen_cutoff, block_size)
    elif backend == "blocked":
        data = blocked(left, right, block_size)
    else:
        raise ValueError(f"Unknown matmul backend: {backend}")
    return CountMatrix(a.rows, b.cols, data, a.row_space, b.col_space)


def schoolbook(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Reference triple loop over Python integers."""
    m, k = left.shape
    n = right.shape[1]
    lhs = left.tolist()
    rhs = right.tolist()
    out = [[0] * n for _ in range(m)]
    for i in range(m):
        row = out[i]
        for t in range(k):
            value = lhs[i][t]
            if not value:
                continue
            other = rhs[t]
            for j in range(n):
                row[j] += value * other[j]
    return np.array(out, dtype=np.int64).reshape(m, n)


def blocked(left: np.ndarray, right: np.ndarray, block_size: int = 64) -> np.ndarray:
    """Cache-blocked numpy product."""
    m, k = left.shape
    n = right.shape[1]
    out = np.zeros((m, n), dtype=np.int64)
    for i0 in range(0, m, block_size):
        i1 = min(i0 + block_size, m)
        for j0 in range(0, n, block_size):
            j1 = min(j0 + block_size, n)
            for k0 in range(0, k, block_size):
                k1 = min(k0 + block_size, k)
                out[i0:i1, j0:j1] += left[i0:i1, k0:k1] @ right[k0:k1, j0:j1]
    return out


def next_power_of_2(x: int) -> int:
    return 1 if x == 0 else 2 ** (x - 1).bit_length()


def _pad(matrix: np.ndarray, size: int) -> np.ndarray:
    padded = np.zeros((size, size), dtype=np.int64)
    padded[: matrix.shape[0], : matrix.shape[1]] = matrix
    return padded


def _split(matrix: np.ndarray):
    half = matrix.shape[0] // 2
    return matrix[:half, :half], matrix[:half, half:], matrix[half:, :half], matrix[half:, half:]


def _strassen(x: np.ndarray, y: np.ndarray, cutoff: int) -> np.ndarray:
    if x.shape[0] <= cutoff:
        return x @ y

    a, b, c, d = _split(x)
    e, f, g, h = _split(y)

    p1 = _strassen(a, f - h, cutoff)
    p2 = _strassen(a + b, h, cutoff)
    p3 = _strassen(c + d, e, cutoff)
    p4 = _strassen(d, g - e, cutoff)
    p5 = _strassen(a + d, e + h, cutoff)
    p6 = _strassen(b - d, g + h, cutoff)
    p7 = _strassen(a - c, e + f, cutoff)

    c11 = p5 + p4 - p2 + p6
    c12 = p1 + p2
    c21 = p3 + p4
    c22 = p1 + p5 - p3 - p7

    return np.vstack((np.hstack((c11, c12)), np.hstack((c21, c22))))


def strassen_product(left: np.ndarray, right: np.ndarray, cutoff: int = 32, block_size: int = 64) -> np.ndarray:
    """
    Strassen product on power-of-two padded squares.

    Intermediate quadrant sums grow by up to 16x per recursion level; when that margin
    does not fit int64 the blocked product is used instead.
    """
    m, k = left.shape
    n = right.shape[1]
    size = next_power_of_2(max(m, k, n, 1))
    if size <= cutoff:
        return blocked(left, right, block_size)
    depth = 0
    while (size >> depth) > cutoff:
        depth += 1
    bound = product_bound(_max_abs(left), _max_abs(right), size) * 16**depth
    if bound > INT64_MAX:
        logger.debug(f"Strassen margin {bound} exceeds int64, using blocked product")
        return blocked(left, right, block_size)
    result = _strassen(_pad(left, size), _pad(right, size), cutoff)
    return result[:m, :n]
