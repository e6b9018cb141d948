"""Dense linear algebra over GF(2).

Rows are stored as Python integers used as bit vectors: bit ``c`` of
``rows[r]`` is the entry at ``(r, c)``.  Matrices are immutable; every
operation returns a new :class:`BitMatrix`.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass


class DimensionError(ValueError):
    """Raised when matrix shapes are incompatible."""


@dataclass(frozen=True)
class BitMatrix:
    """A ``nrows x ncols`` matrix over GF(2).

    Attributes
    ----------
    rows : tuple[int, ...]
        One bit vector per row.
    ncols : int
        Number of columns.
    row_labels, col_labels : tuple | None
        Optional labels (vertex indices for induced adjacency matrices).
    """

    rows: tuple[int, ...]
    ncols: int
    row_labels: tuple | None = None
    col_labels: tuple | None = None

    def __post_init__(self) -> None:
        limit = 1 << self.ncols
        for r in self.rows:
            if r < 0 or r >= limit:
                raise DimensionError(f"row {r:#b} does not fit in {self.ncols} columns")
        if self.row_labels is not None and len(self.row_labels) != len(self.rows):
            raise DimensionError("row label count differs from row count")
        if self.col_labels is not None and len(self.col_labels) != self.ncols:
            raise DimensionError("column label count differs from column count")

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), self.ncols)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> BitMatrix:
        return cls((0,) * nrows, ncols)

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        return cls(tuple(1 << i for i in range(n)), n)

    @classmethod
    def from_lists(cls, data: Sequence[Sequence[int]], ncols: int | None = None) -> BitMatrix:
        """Build from a nested list of 0/1 entries."""
        if ncols is None:
            ncols = len(data[0]) if data else 0
        rows = []
        for line in data:
            if len(line) != ncols:
                raise DimensionError("ragged row")
            rows.append(sum(1 << c for c, bit in enumerate(line) if bit & 1))
        return cls(tuple(rows), ncols)

    def to_lists(self) -> list[list[int]]:
        return [[(r >> c) & 1 for c in range(self.ncols)] for r in self.rows]

    def __getitem__(self, index: tuple[int, int]) -> int:
        r, c = index
        if not (0 <= r < self.nrows and 0 <= c < self.ncols):
            raise IndexError(f"entry {index} outside {self.shape}")
        return (self.rows[r] >> c) & 1

    def column(self, c: int) -> int:
        """Column ``c`` as a bit vector indexed by row."""
        return sum(((r >> c) & 1) << i for i, r in enumerate(self.rows))

    def matvec(self, x: int) -> int:
        """``A x`` for a bit vector ``x`` of length ``ncols``; result indexed by row."""
        out = 0
        for i, r in enumerate(self.rows):
            if (r & x).bit_count() & 1:
                out |= 1 << i
        return out

    def with_labels(self, row_labels: Iterable | None, col_labels: Iterable | None) -> BitMatrix:
        return BitMatrix(
            self.rows,
            self.ncols,
            None if row_labels is None else tuple(row_labels),
            None if col_labels is None else tuple(col_labels),
        )

    def __str__(self) -> str:
        return "\n".join("".join(str(b) for b in line) for line in self.to_lists())


def multiply(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    """Matrix product with XOR accumulation."""
    if a.ncols != b.nrows:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    out = []
    for r in a.rows:
        acc = 0
        k = 0
        while r:
            if r & 1:
                acc ^= b.rows[k]
            r >>= 1
            k += 1
        out.append(acc)
    return BitMatrix(tuple(out), b.ncols, a.row_labels, b.col_labels)


def transpose(a: BitMatrix) -> BitMatrix:
    return BitMatrix(tuple(a.column(c) for c in range(a.ncols)), a.nrows, a.col_labels, a.row_labels)


def _eliminate(rows: list[int], ncols: int) -> list[int]:
    """Reduce ``rows`` in place to reduced row echelon form; return pivot columns.

    Pivots are taken on the lowest-index column, using the lowest-index
    row that has a one there.
    """
    pivots: list[int] = []
    top = 0
    for c in range(ncols):
        bit = 1 << c
        pivot = next((r for r in range(top, len(rows)) if rows[r] & bit), None)
        if pivot is None:
            continue
        rows[top], rows[pivot] = rows[pivot], rows[top]
        for r in range(len(rows)):
            if r != top and rows[r] & bit:
                rows[r] ^= rows[top]
        pivots.append(c)
        top += 1
        if top == len(rows):
            break
    return pivots


def rank(a: BitMatrix) -> int:
    pivots = _eliminate(list(a.rows), a.ncols)
    return len(pivots)


def solve(a: BitMatrix, b: int | Sequence[int]) -> int | None:
    """Return some ``x`` with ``a x = b``, or ``None`` if the system is inconsistent.

    ``b`` is a bit vector indexed by row (or a 0/1 sequence).  Free variables
    are fixed to 0, so the answer is deterministic.
    """
    if not isinstance(b, int):
        if len(b) != a.nrows:
            raise DimensionError("right-hand side length differs from row count")
        b = sum(1 << i for i, bit in enumerate(b) if bit & 1)
    n = a.ncols
    # augment each row with its right-hand-side bit in column n
    aug = [r | (((b >> i) & 1) << n) for i, r in enumerate(a.rows)]
    pivots = _eliminate(aug, n)
    rhs = 1 << n
    for r in aug[len(pivots):]:
        if r & rhs:
            return None
    x = 0
    for row, c in zip(aug, pivots):
        if row & rhs:
            x |= 1 << c
    return x


def invert(a: BitMatrix) -> BitMatrix | None:
    """Two-sided inverse, or ``None`` when ``a`` is singular."""
    n = a.nrows
    if a.ncols != n:
        raise DimensionError(f"cannot invert non-square {a.shape} matrix")
    aug = [r | (1 << (n + i)) for i, r in enumerate(a.rows)]
    pivots = _eliminate(aug, n)
    if len(pivots) < n:
        return None
    mask = (1 << n) - 1
    inv = tuple((r >> n) & mask for r in aug)
    return BitMatrix(inv, n, a.col_labels, a.row_labels)


def vector_to_bits(x: int, length: int) -> tuple[int, ...]:
    return tuple((x >> i) & 1 for i in range(length))
