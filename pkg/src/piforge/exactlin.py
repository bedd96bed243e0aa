"""Exact rational linear algebra on small dense matrices.

Scalars are `fractions.Fraction`, so every result here is exact: no pivots by
magnitude, no tolerances, no floating point anywhere. Matrices are immutable
row-major tuples sized for desk-scale work (a dozen columns, not thousands).

The one piece of policy lives in `kernel_basis`: kernel vectors come from the
standard RREF free-variable construction, ordered by increasing free column,
and are rescaled to primitive integer vectors. The rescale factor is always
positive, so the +1 the construction places at the free column stays positive;
this makes the output reproducible and directly comparable across runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import NoSolutionError, SingularMatrixError

Rational = Fraction

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _as_rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int) or isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


@dataclass(frozen=True)
class QMatrix:
    """Immutable rows x cols matrix of exact rationals, row-major."""

    rows: int
    cols: int
    entries: tuple[Fraction, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"entry count {len(self.entries)} != {self.rows}x{self.cols}"
            )

    @classmethod
    def from_rows(cls, rows) -> "QMatrix":
        """Build from an iterable of equal-length rows; entries may be int,
        str ("2/3"), or Fraction."""
        materialized = [[_as_rational(v) for v in row] for row in rows]
        nrows = len(materialized)
        ncols = len(materialized[0]) if materialized else 0
        if any(len(r) != ncols for r in materialized):
            raise ValueError("rows have unequal lengths")
        flat = tuple(v for row in materialized for v in row)
        return cls(nrows, ncols, flat)

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls(n, n, tuple(_ONE if i == j else _ZERO for i in range(n) for j in range(n)))

    @classmethod
    def zero(cls, rows: int, cols: int) -> "QMatrix":
        return cls(rows, cols, (_ZERO,) * (rows * cols))

    def at(self, i: int, j: int) -> Fraction:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def col(self, j: int) -> tuple[Fraction, ...]:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_rows(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> "QMatrix":
        return QMatrix(
            self.cols,
            self.rows,
            tuple(self.at(i, j) for j in range(self.cols) for i in range(self.rows)),
        )

    def mul_vec(self, v) -> tuple[Fraction, ...]:
        if len(v) != self.cols:
            raise ValueError(f"vector length {len(v)} != cols {self.cols}")
        vv = [_as_rational(x) for x in v]
        return tuple(
            sum((self.at(i, j) * vv[j] for j in range(self.cols)), _ZERO)
            for i in range(self.rows)
        )

    def matmul(self, other: "QMatrix") -> "QMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch: {self.cols} != {other.rows}")
        flat = []
        for i in range(self.rows):
            for j in range(other.cols):
                flat.append(
                    sum((self.at(i, k) * other.at(k, j) for k in range(self.cols)), _ZERO)
                )
        return QMatrix(self.rows, other.cols, tuple(flat))

    def __str__(self) -> str:
        return "\n".join(
            "[" + "  ".join(str(v) for v in self.row(i)) + "]" for i in range(self.rows)
        )


def rref(m: QMatrix) -> tuple[QMatrix, tuple[int, ...], int]:
    """Reduced row echelon form of m.

    Returns (reduced, pivot_cols, rank). Pivoting takes the first nonzero
    entry in each column — exact arithmetic needs no magnitude heuristics.
    """
    work = m.to_rows()
    nrows, ncols = m.rows, m.cols
    pivot_cols: list[int] = []
    piv_row = 0
    for col in range(ncols):
        if piv_row >= nrows:
            break
        sel = None
        for r in range(piv_row, nrows):
            if work[r][col] != 0:
                sel = r
                break
        if sel is None:
            continue
        if sel != piv_row:
            work[piv_row], work[sel] = work[sel], work[piv_row]
        pivot = work[piv_row][col]
        if pivot != 1:
            work[piv_row] = [v / pivot for v in work[piv_row]]
        for r in range(nrows):
            if r == piv_row:
                continue
            factor = work[r][col]
            if factor != 0:
                work[r] = [a - factor * b for a, b in zip(work[r], work[piv_row])]
        pivot_cols.append(col)
        piv_row += 1
    reduced = QMatrix.from_rows(work) if nrows else QMatrix.zero(0, ncols)
    return reduced, tuple(pivot_cols), len(pivot_cols)


def rank(m: QMatrix) -> int:
    return rref(m)[2]


def _primitive(vec: list[Fraction]) -> tuple[Fraction, ...]:
    """Scale a rational vector by a positive factor to coprime integers."""
    denoms = [v.denominator for v in vec if v != 0]
    if not denoms:
        return tuple(vec)
    scale = math.lcm(*denoms)
    ints = [v * scale for v in vec]
    common = math.gcd(*(abs(int(v)) for v in ints if v != 0))
    if common > 1:
        ints = [v / common for v in ints]
    return tuple(ints)


def kernel_basis(m: QMatrix) -> list[tuple[Fraction, ...]]:
    """Basis of {v : m v = 0}, one vector per free column.

    Vectors are ordered by increasing free-column index and scaled to
    primitive integers (positive scale factor, so the free-column entry
    stays +).
    """
    reduced, pivot_cols, rk = rref(m)
    free_cols = [c for c in range(m.cols) if c not in pivot_cols]
    basis = []
    for free in free_cols:
        vec = [_ZERO] * m.cols
        vec[free] = _ONE
        for row_idx, pc in enumerate(pivot_cols):
            vec[pc] = -reduced.at(row_idx, free)
        basis.append(_primitive(vec))
    return basis


def solve(a: QMatrix, b) -> tuple[Fraction, ...]:
    """Exact solution of a x = b with free variables pinned to zero.

    Raises NoSolutionError when b is outside the column space of a.
    """
    bb = [_as_rational(v) for v in b]
    if len(bb) != a.rows:
        raise ValueError(f"right-hand side length {len(bb)} != rows {a.rows}")
    if a.rows == 0:
        return (_ZERO,) * a.cols
    augmented = QMatrix.from_rows(
        [list(a.row(i)) + [bb[i]] for i in range(a.rows)]
    )
    reduced, pivot_cols, rk = rref(augmented)
    if a.cols in pivot_cols:
        raise NoSolutionError("right-hand side is outside the column space")
    x = [_ZERO] * a.cols
    for row_idx, pc in enumerate(pivot_cols):
        x[pc] = reduced.at(row_idx, a.cols)
    return tuple(x)


def invert(m: QMatrix) -> QMatrix:
    """Exact inverse; raises SingularMatrixError when rank < n."""
    if m.rows != m.cols:
        raise ValueError("inversion requires a square matrix")
    n = m.rows
    if n == 0:
        return m
    augmented = QMatrix.from_rows(
        [list(m.row(i)) + [(_ONE if i == j else _ZERO) for j in range(n)] for i in range(n)]
    )
    reduced, pivot_cols, rk = rref(augmented)
    # [m | I] always has full row rank; m is invertible iff the first n
    # pivots land in the left block.
    if pivot_cols[:n] != tuple(range(n)):
        raise SingularMatrixError(f"matrix of rank {rank(m)} < {n} has no inverse")
    flat = tuple(reduced.at(i, n + j) for i in range(n) for j in range(n))
    return QMatrix(n, n, flat)
