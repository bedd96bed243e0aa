"""Unit registries, the consistency test, and fundamental-unit expression.

A registry stores named units as Quantity values in an implicit coherent
reference system (whatever the registry file declares; there is no hidden SI
assumption). A list of units is *consistent* when no product of powers of
them is dimensionless yet different from 1 — `is_consistent` searches the
kernel of the dimension matrix for such a clash and reports the first one
found, e.g. cm/hr/knot clashing by a factor of 185200.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from . import dsl
from .core import DimSystem, Monomial, Quantity, dimension_matrix, qty_combine
from .errors import (
    DependentBaseError,
    EmptyListError,
    InconsistentUnitsError,
    NoSolutionError,
    ParseError,
    SystemMismatchError,
    UnknownUnitError,
)
from .exactlin import kernel_basis, rref, solve

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class ClashWitness:
    """A product of powers of the units that is dimensionless but not 1."""

    combo: Monomial
    clash_factor: float


@dataclass(frozen=True)
class ConsistencyReport:
    consistent: bool
    witness: ClashWitness | None

    def __post_init__(self):
        if self.consistent == (self.witness is not None):
            raise ValueError("witness must be present exactly when inconsistent")


class UnitRegistry:
    """Named units over one dimension system; immutable after construction."""

    def __init__(self, system: DimSystem, entries: dict[str, Quantity]):
        for name, q in entries.items():
            if q.dim.system != system:
                raise SystemMismatchError(f"unit {name!r} is not over {system.names}")
        self.system = system
        self._entries = dict(entries)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self._entries.keys())

    def quantity(self, name: str) -> Quantity:
        try:
            return self._entries[name]
        except KeyError:
            raise UnknownUnitError(
                f"unknown unit {name!r} (registry has: {', '.join(self._entries) or 'nothing'})"
            ) from None

    @classmethod
    def from_dict(cls, raw: dict, source: str = "<dict>") -> "UnitRegistry":
        for key in ("system", "units"):
            if key not in raw:
                raise ParseError(f"registry {source}: missing key {key!r}")
        system = DimSystem(tuple(raw["system"]))
        entries: dict[str, Quantity] = {}
        for name, spec in raw["units"].items():
            magnitude = float(spec["magnitude"])
            if magnitude <= 0:
                raise ParseError(f"registry {source}: unit {name!r} has non-positive magnitude")
            dim = dsl.parse_dimension(spec["dim"], system)
            entries[name] = Quantity(math.log(magnitude), dim)
        return cls(system, entries)

    @classmethod
    def load(cls, path) -> "UnitRegistry":
        try:
            raw = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ParseError(f"cannot read registry {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ParseError(f"registry {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(raw, source=str(path))


def is_consistent(units, tol: float = DEFAULT_TOL) -> ConsistencyReport:
    """Decide consistency of a unit list.

    Every kernel vector of the dimension matrix gives a dimensionless product
    of powers of the units; the list is consistent iff all of them have
    magnitude 1 (|log| <= tol). The first violator becomes the witness.
    """
    units = list(units)
    if not units:
        raise EmptyListError("consistency is defined for nonempty unit lists")
    system = units[0].dim.system
    matrix = dimension_matrix(system, [u.dim for u in units])
    for vec in kernel_basis(matrix):
        combo = Monomial(vec)
        value = qty_combine(combo, units)
        if abs(value.log_magnitude) > tol:
            witness = ClashWitness(combo, math.exp(value.log_magnitude))
            return ConsistencyReport(consistent=False, witness=witness)
    return ConsistencyReport(consistent=True, witness=None)


def fundamental_basis(units, tol: float = DEFAULT_TOL) -> list[Quantity]:
    """A maximal sub-list with linearly independent dimensions.

    Takes the pivot columns of the dimension matrix in input order (the first
    maximal independent subfamily); every input unit is then an exact-dimension
    combination of the result. Requires a consistent input list.
    """
    units = list(units)
    report = is_consistent(units, tol=tol)
    if not report.consistent:
        raise InconsistentUnitsError(
            f"unit list clashes by factor {report.witness.clash_factor:.15g}"
        )
    system = units[0].dim.system
    matrix = dimension_matrix(system, [u.dim for u in units])
    _, pivot_cols, _ = rref(matrix)
    return [units[i] for i in pivot_cols]


def express(base, targets, tol: float = DEFAULT_TOL) -> list[Monomial]:
    """Coefficients expressing each target as a product of powers of the base.

    The base dimensions must be linearly independent, so each coefficient
    vector is unique once it exists; NoSolutionError means no combination of
    the base equals the target (target dimension outside the span, or the
    magnitudes disagree beyond tol in log space).
    """
    base = list(base)
    targets = list(targets)
    if not base:
        raise DependentBaseError("an empty base spans nothing")
    system = base[0].dim.system
    matrix = dimension_matrix(system, [u.dim for u in base])
    _, _, rk = rref(matrix)
    if rk < len(base):
        raise DependentBaseError("base dimensions are linearly dependent")
    results = []
    for target in targets:
        try:
            coeffs = solve(matrix, target.dim.exponents)
        except NoSolutionError:
            raise NoSolutionError(
                f"target dimension {target.dim} is outside the span of the base"
            ) from None
        combo = Monomial(coeffs)
        reproduced = qty_combine(combo, base)
        if abs(reproduced.log_magnitude - target.log_magnitude) > tol:
            raise NoSolutionError(
                "no base combination reaches the target: the unique dimension-matched "
                f"combination differs in magnitude by factor "
                f"{math.exp(reproduced.log_magnitude - target.log_magnitude):.15g}"
            )
        results.append(combo)
    return results
