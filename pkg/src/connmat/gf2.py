"""Sparse and dense matrix arithmetic over GF(2).

Indices are 1-based, as in the reduction algorithm; ``low`` returns 0 for a
zero column. Columns and rows are stored as Python ints used as bitsets (bit
``r`` set means a 1 in row ``r``), so column XOR, ``low`` and "next nonzero
entry below row i" are single integer operations. A row-major mirror is kept
in sync because the reduction interleaves column and row additions.

Dense matrices are plain ``numpy`` ``uint8`` arrays and are only used on
oracle/debug paths, behind a size gate.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Sequence

import numpy as np

from .errors import DenseSizeError

DENSE_LIMIT = 512


def iter_bits(x: int) -> Iterator[int]:
    """Yield the positions of set bits of ``x`` in increasing order."""
    while x:
        lsb = x & -x
        yield lsb.bit_length() - 1
        x ^= lsb


def bits_to_mask(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask ^= 1 << i
    return mask


class SparseGF2Matrix:
    """An ``n_rows x n_cols`` GF(2) matrix with 1-based row and column indices.

    ``cols[j]`` and ``rows[i]`` are the bitsets of column ``j`` and row ``i``;
    callers that mutate them directly must keep both in sync.
    """

    __slots__ = ("n_rows", "n_cols", "cols", "rows")

    def __init__(self, n_rows: int, n_cols: int):
        if n_rows < 0 or n_cols < 0:
            raise ValueError("matrix dimensions must be non-negative")
        self.n_rows = n_rows
        self.n_cols = n_cols
        # slot 0 unused so that index == position
        self.cols = [0] * (n_cols + 1)
        self.rows = [0] * (n_rows + 1)

    @classmethod
    def from_columns(
        cls, n_rows: int, columns: Sequence[Iterable[int]], n_cols: int | None = None
    ) -> SparseGF2Matrix:
        """Build from a list of row-index collections, one per column.

        Repeated indices within a column cancel, as they would over GF(2).
        """
        if n_cols is None:
            n_cols = len(columns)
        if len(columns) != n_cols:
            raise ValueError(f"expected {n_cols} columns, got {len(columns)}")
        m = cls(n_rows, n_cols)
        for j, col in enumerate(columns, start=1):
            for r in col:
                if not 1 <= r <= n_rows:
                    raise IndexError(f"row index {r} out of range 1..{n_rows}")
                m.cols[j] ^= 1 << r
                m.rows[r] ^= 1 << j
        return m

    @classmethod
    def from_dense(cls, a) -> SparseGF2Matrix:
        a = np.asarray(a)
        n_rows, n_cols = a.shape
        cols = [[int(r) + 1 for r in np.flatnonzero(a[:, j] & 1)] for j in range(n_cols)]
        return cls.from_columns(n_rows, cols, n_cols)

    @classmethod
    def identity(cls, n: int) -> SparseGF2Matrix:
        return cls.from_columns(n, [[j] for j in range(1, n + 1)])

    def copy(self) -> SparseGF2Matrix:
        m = SparseGF2Matrix.__new__(SparseGF2Matrix)
        m.n_rows = self.n_rows
        m.n_cols = self.n_cols
        m.cols = list(self.cols)
        m.rows = list(self.rows)
        return m

    # -- access -----------------------------------------------------------

    def _check_col(self, j: int) -> None:
        if not 1 <= j <= self.n_cols:
            raise IndexError(f"column index {j} out of range 1..{self.n_cols}")

    def _check_row(self, i: int) -> None:
        if not 1 <= i <= self.n_rows:
            raise IndexError(f"row index {i} out of range 1..{self.n_rows}")

    def low(self, j: int) -> int:
        """Row index of the lowest 1 in column ``j``, or 0 for a zero column."""
        self._check_col(j)
        return max(self.cols[j].bit_length() - 1, 0)

    def column(self, j: int) -> list[int]:
        self._check_col(j)
        return list(iter_bits(self.cols[j]))

    def row(self, i: int) -> list[int]:
        self._check_row(i)
        return list(iter_bits(self.rows[i]))

    def column_mask(self, j: int) -> int:
        return self.cols[j]

    def row_mask(self, i: int) -> int:
        return self.rows[i]

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        self._check_row(i)
        self._check_col(j)
        return (self.cols[j] >> i) & 1

    def toggle(self, i: int, j: int) -> None:
        self._check_row(i)
        self._check_col(j)
        self.cols[j] ^= 1 << i
        self.rows[i] ^= 1 << j

    def is_zero_column(self, j: int) -> bool:
        self._check_col(j)
        return self.cols[j] == 0

    def entries(self) -> Iterator[tuple[int, int]]:
        """All (row, column) positions holding a 1, column-major."""
        for j in range(1, self.n_cols + 1):
            for i in iter_bits(self.cols[j]):
                yield i, j

    def nnz(self) -> int:
        return sum(c.bit_count() for c in self.cols)

    @property
    def shape(self) -> tuple[int, int]:
        return self.n_rows, self.n_cols

    def columns(self) -> list[list[int]]:
        return [list(iter_bits(c)) for c in self.cols[1:]]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseGF2Matrix):
            return NotImplemented
        return self.shape == other.shape and self.cols == other.cols

    def __repr__(self) -> str:
        return f"SparseGF2Matrix({self.n_rows}x{self.n_cols}, columns={self.columns()})"

    # -- elementary operations ---------------------------------------------

    def add_column(self, src: int, dst: int) -> None:
        """Column ``dst`` += column ``src``."""
        if src == dst:
            raise ValueError("cannot add a column to itself")
        self._check_col(src)
        self._check_col(dst)
        col = self.cols[src]
        self.cols[dst] ^= col
        bit = 1 << dst
        rows = self.rows
        for r in iter_bits(col):
            rows[r] ^= bit

    def add_row(self, src: int, dst: int) -> None:
        """Row ``dst`` += row ``src``."""
        if src == dst:
            raise ValueError("cannot add a row to itself")
        self._check_row(src)
        self._check_row(dst)
        row = self.rows[src]
        self.rows[dst] ^= row
        bit = 1 << dst
        cols = self.cols
        for c in iter_bits(row):
            cols[c] ^= bit

    def conjugate_by_addition(self, s: int, j: int) -> None:
        """Add column ``s`` to column ``j``, then row ``j`` to row ``s``.

        With E the identity plus a single 1 at (s, j), the result A' satisfies
        E A' = A E.
        """
        if self.n_rows != self.n_cols:
            raise ValueError("conjugation needs a square matrix")
        self.add_column(s, j)
        self.add_row(j, s)

    # -- conversions --------------------------------------------------------

    def to_dense(self, limit: int | None = DENSE_LIMIT) -> np.ndarray:
        if limit is not None and max(self.n_rows, self.n_cols) > limit:
            raise DenseSizeError(
                f"refusing dense conversion of a {self.n_rows}x{self.n_cols} matrix (limit {limit})"
            )
        a = np.zeros((self.n_rows, self.n_cols), dtype=np.uint8)
        for i, j in self.entries():
            a[i - 1, j - 1] = 1
        return a

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> SparseGF2Matrix:
        """Restriction to the given rows and columns, renumbered 1..len in the given order."""
        row_pos = {r: k for k, r in enumerate(rows, start=1)}
        out = []
        for c in cols:
            out.append([row_pos[r] for r in iter_bits(self.cols[c]) if r in row_pos])
        return SparseGF2Matrix.from_columns(len(rows), out, len(cols))


def rank(m: SparseGF2Matrix | np.ndarray) -> int:
    """GF(2) rank by column elimination on pivots (lowest 1)."""
    if isinstance(m, SparseGF2Matrix):
        cols = [m.column_mask(j) for j in range(1, m.n_cols + 1)]
    else:
        a = np.asarray(m)
        cols = [bits_to_mask(int(r) for r in np.flatnonzero(a[:, j] & 1)) for j in range(a.shape[1])]
    pivots: dict[int, int] = {}
    r = 0
    for c in cols:
        while c:
            top = c.bit_length()
            if top in pivots:
                c ^= pivots[top]
            else:
                pivots[top] = c
                r += 1
                break
    return r


# -- dense helpers (oracle side) ------------------------------------------------


def multiply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product over GF(2)."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    return ((a.astype(np.int64) @ b.astype(np.int64)) & 1).astype(np.uint8)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.uint8)


def addition_matrix(n: int, s: int, j: int) -> np.ndarray:
    """Identity plus a single 1 at 1-based position (s, j)."""
    if s == j:
        raise ValueError("addition matrix needs s != j")
    e = identity(n)
    e[s - 1, j - 1] ^= 1
    return e


def is_zero(a: np.ndarray) -> bool:
    return not np.any(np.asarray(a) & 1)
