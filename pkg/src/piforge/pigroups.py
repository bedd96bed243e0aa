"""Bases of the space of dimensionless products of powers.

Given dimensions w1..wn of rank m, the n-input combinations annihilating them
form an r = n - m dimensional space. `pi_basis` returns its canonical basis
(the RREF free-variable kernel, primitive integers); `special_basis` returns
the basis in which each group carries exactly one "free" variable to the
first power, the rest drawn from a fixed pivot set; `transition` computes the
exact invertible change of basis between any two bases.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import DimVector, Monomial, dim_combine, dimension_matrix
from .errors import NotABasisError
from .exactlin import QMatrix, invert, kernel_basis, rref, solve

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _dimension_matrix_of(dims) -> QMatrix:
    return dimension_matrix(dims[0].system, dims)


def _exponent_matrix(groups) -> QMatrix:
    """Stack the groups' exponent vectors as rows (r x n)."""
    return QMatrix.from_rows([list(g.exponents) for g in groups])


@dataclass(frozen=True)
class PiBasis:
    """A basis of the annihilator space over fixed dims; validated on construction."""

    dims: tuple[DimVector, ...]
    groups: tuple[Monomial, ...]

    def __post_init__(self):
        if not self.dims:
            raise NotABasisError("a pi basis needs at least one dimension slot")
        n = len(self.dims)
        matrix = _dimension_matrix_of(self.dims)
        expected_r = n - rref(matrix)[2]
        if len(self.groups) != expected_r:
            raise NotABasisError(
                f"{len(self.groups)} groups for a kernel of dimension {expected_r}"
            )
        for g in self.groups:
            if g.arity != n:
                raise NotABasisError(f"group arity {g.arity} != {n}")
            if not dim_combine(g, self.dims).is_zero():
                raise NotABasisError(f"group {g} does not annihilate the dimensions")
        if self.groups:
            if rref(_exponent_matrix(self.groups))[2] != len(self.groups):
                raise NotABasisError("groups are linearly dependent")

    @property
    def r(self) -> int:
        return len(self.groups)


@dataclass(frozen=True)
class SpecialPiBasis:
    """A pi basis where group i is x_{free_i} times a combination of the pivots."""

    base: PiBasis
    pivot_indices: tuple[int, ...]
    free_indices: tuple[int, ...]

    def __post_init__(self):
        n = len(self.base.dims)
        if sorted(self.pivot_indices + self.free_indices) != list(range(n)):
            raise NotABasisError("pivot and free indices must partition the slots")
        for group, free in zip(self.base.groups, self.free_indices):
            for other in self.free_indices:
                want = _ONE if other == free else _ZERO
                if group.exponents[other] != want:
                    raise NotABasisError(
                        f"group for free slot {free} has coefficient "
                        f"{group.exponents[other]} at free slot {other}"
                    )


@dataclass(frozen=True)
class Transition:
    """Exact change of basis: row i of matrix expresses the target's group i
    in the source basis; inverse is the exact matrix inverse."""

    matrix: QMatrix
    inverse: QMatrix

    def __post_init__(self):
        product = self.matrix.matmul(self.inverse)
        if product != QMatrix.identity(self.matrix.rows):
            raise NotABasisError("transition matrix and inverse do not multiply to identity")


def pi_basis(dims) -> PiBasis:
    """Canonical basis of the annihilator space of dims (may be empty, r = 0)."""
    dims = tuple(dims)
    groups = tuple(Monomial(vec) for vec in kernel_basis(_dimension_matrix_of(dims)))
    return PiBasis(dims=dims, groups=groups)


def special_basis(dims) -> SpecialPiBasis:
    """The special basis over the first maximal independent subfamily of dims.

    Pivot slots are the RREF pivot columns of the dimension matrix; the group
    for each free slot l puts coefficient 1 at l and solves the pivot
    exponents exactly so the combination is dimensionless.
    """
    dims = tuple(dims)
    matrix = _dimension_matrix_of(dims)
    _, pivot_cols, _ = rref(matrix)
    free_cols = tuple(i for i in range(len(dims)) if i not in pivot_cols)
    pivot_matrix = QMatrix.from_rows(
        [[matrix.at(i, j) for j in pivot_cols] for i in range(matrix.rows)]
    )
    groups = []
    for free in free_cols:
        # w_free = product of pivot dims^lambda; the group divides x_free by it.
        lambdas = solve(pivot_matrix, matrix.col(free))
        coeffs = [_ZERO] * len(dims)
        coeffs[free] = _ONE
        for pc, lam in zip(pivot_cols, lambdas):
            coeffs[pc] = -lam
        groups.append(Monomial(tuple(coeffs)))
    base = PiBasis(dims=dims, groups=tuple(groups))
    return SpecialPiBasis(base=base, pivot_indices=pivot_cols, free_indices=free_cols)


def transition(psi: PiBasis, pi: PiBasis) -> Transition:
    """The exact transition from basis psi to basis pi over the same dims.

    Row i of the matrix holds the unique coefficients with
    pi.groups[i] = sum_j M[i][j] * psi.groups[j].
    """
    if psi.dims != pi.dims:
        raise NotABasisError("transition requires bases over identical dimensions")
    r = psi.r
    if r == 0:
        identity = QMatrix.identity(0)
        return Transition(matrix=identity, inverse=identity)
    # Columns are psi's exponent vectors; solving against each pi group is
    # exact because both span the same kernel.
    columns = _exponent_matrix(psi.groups).transpose()
    rows = [list(solve(columns, pi.groups[i].exponents)) for i in range(r)]
    matrix = QMatrix.from_rows(rows)
    return Transition(matrix=matrix, inverse=invert(matrix))


def is_pi_basis(candidate, dims) -> bool:
    """True iff the candidate groups form a basis of the annihilator space."""
    dims = tuple(dims)
    candidate = tuple(candidate)
    n = len(dims)
    if any(g.arity != n for g in candidate):
        return False
    matrix = _dimension_matrix_of(dims)
    expected_r = n - rref(matrix)[2]
    if len(candidate) != expected_r:
        return False
    if any(not dim_combine(g, dims).is_zero() for g in candidate):
        return False
    if not candidate:
        return True
    return rref(_exponent_matrix(candidate))[2] == len(candidate)
