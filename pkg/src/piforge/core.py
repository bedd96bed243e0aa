"""Dimensions, positive quantities, and monomial combination maps.

A `DimSystem` declares an ordered list of fundamental dimensions; a
`DimVector` is an exact rational exponent vector over them; a `Quantity`
pairs a dimension with a strictly positive magnitude stored as its natural
log. Magnitude arithmetic therefore happens additively in log space (closed
under rational powers, numerically tame), while dimension arithmetic is
always exact.

A `Monomial` is a product-of-powers map x1^e1 * ... * xk^ek identified with
its exponent vector; `qty_combine` / `dim_combine` apply one to quantities or
dimensions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    ArityMismatchError,
    DimensionMismatchError,
    SystemMismatchError,
)
from .exactlin import QMatrix

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class DimSystem:
    """Ordered, distinct fundamental dimension names, e.g. ("M", "L", "T")."""

    names: tuple[str, ...]

    def __post_init__(self):
        if not self.names:
            raise ValueError("a dimension system needs at least one fundamental")
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate fundamental names in {self.names}")
        if any(not n for n in self.names):
            raise ValueError("fundamental names must be nonempty")

    @property
    def size(self) -> int:
        return len(self.names)

    def axis(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown fundamental {name!r}") from None


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"dimension exponents must be exact rationals, got {type(value).__name__}")


@dataclass(frozen=True)
class DimVector:
    """Exact exponent vector over a DimSystem; the zero vector is dimensionless."""

    system: DimSystem
    exponents: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.exponents) != self.system.size:
            raise ValueError(
                f"{len(self.exponents)} exponents for {self.system.size} fundamentals"
            )

    @classmethod
    def zero(cls, system: DimSystem) -> "DimVector":
        return cls(system, (_ZERO,) * system.size)

    @classmethod
    def unit(cls, system: DimSystem, name: str) -> "DimVector":
        axis = system.axis(name)
        return cls(system, tuple(_ONE if i == axis else _ZERO for i in range(system.size)))

    @classmethod
    def of(cls, system: DimSystem, **exponents) -> "DimVector":
        vec = [_ZERO] * system.size
        for name, value in exponents.items():
            vec[system.axis(name)] = _as_fraction(value)
        return cls(system, tuple(vec))

    def _check_system(self, other: "DimVector"):
        if self.system != other.system:
            raise SystemMismatchError(
                f"cannot combine dimensions over {self.system.names} and {other.system.names}"
            )

    def __mul__(self, other: "DimVector") -> "DimVector":
        self._check_system(other)
        return DimVector(self.system, tuple(a + b for a, b in zip(self.exponents, other.exponents)))

    def __truediv__(self, other: "DimVector") -> "DimVector":
        self._check_system(other)
        return DimVector(self.system, tuple(a - b for a, b in zip(self.exponents, other.exponents)))

    def __pow__(self, exponent) -> "DimVector":
        e = _as_fraction(exponent)
        return DimVector(self.system, tuple(a * e for a in self.exponents))

    def is_zero(self) -> bool:
        return all(e == 0 for e in self.exponents)

    def __str__(self) -> str:
        parts = []
        for name, e in zip(self.system.names, self.exponents):
            if e == 0:
                continue
            if e == 1:
                parts.append(name)
            elif e.denominator == 1:
                parts.append(f"{name}^{e}")
            else:
                parts.append(f"{name}^({e})")
        return "*".join(parts) if parts else "1"


@dataclass(frozen=True)
class Quantity:
    """A strictly positive magnitude (stored as its natural log) with a dimension."""

    log_magnitude: float
    dim: DimVector

    def __post_init__(self):
        if not math.isfinite(self.log_magnitude):
            raise ValueError("quantity magnitudes must be finite and strictly positive")

    @classmethod
    def from_magnitude(cls, magnitude: float, dim: DimVector) -> "Quantity":
        if not (magnitude > 0 and math.isfinite(magnitude)):
            raise ValueError(f"magnitude must be a finite positive real, got {magnitude!r}")
        return cls(math.log(magnitude), dim)

    @classmethod
    def one(cls, system: DimSystem) -> "Quantity":
        """The multiplicative identity: magnitude 1, dimensionless."""
        return cls(0.0, DimVector.zero(system))

    @property
    def magnitude(self) -> float:
        return math.exp(self.log_magnitude)

    def close_to(self, other: "Quantity", tol: float = 1e-9) -> bool:
        """Equal dimension and log magnitudes within an absolute tolerance.

        Dimensions compare exactly; only the magnitude side is tolerant
        (decimal literals cannot hit exact logs).
        """
        return self.dim == other.dim and abs(self.log_magnitude - other.log_magnitude) <= tol

    def __mul__(self, other: "Quantity") -> "Quantity":
        return Quantity(self.log_magnitude + other.log_magnitude, self.dim * other.dim)

    def __truediv__(self, other: "Quantity") -> "Quantity":
        return Quantity(self.log_magnitude - other.log_magnitude, self.dim / other.dim)

    def __pow__(self, exponent) -> "Quantity":
        e = _as_fraction(exponent)
        return Quantity(self.log_magnitude * float(e), self.dim**e)

    def __str__(self) -> str:
        return f"{self.magnitude:.15g} [{self.dim}]"


@dataclass(frozen=True)
class Monomial:
    """A monomial map x1^e1 * ... * xk^ek, identified with its exponent vector."""

    exponents: tuple[Fraction, ...]

    @classmethod
    def of(cls, *exponents) -> "Monomial":
        return cls(tuple(_as_fraction(e) for e in exponents))

    @classmethod
    def projection(cls, index: int, arity: int) -> "Monomial":
        if not 0 <= index < arity:
            raise ValueError(f"projection index {index} outside 0..{arity - 1}")
        return cls(tuple(_ONE if i == index else _ZERO for i in range(arity)))

    @property
    def arity(self) -> int:
        return len(self.exponents)

    def __str__(self) -> str:
        return "(" + ", ".join(str(e) for e in self.exponents) + ")"


def project(x: Quantity) -> DimVector:
    """The projection of a quantity onto its dimension (the coset map)."""
    return x.dim


def _shared_system(values, system: DimSystem | None, kind: str) -> DimSystem:
    if values:
        found = values[0].system if isinstance(values[0], DimVector) else values[0].dim.system
        for v in values[1:]:
            s = v.system if isinstance(v, DimVector) else v.dim.system
            if s != found:
                raise SystemMismatchError(f"{kind} span multiple dimension systems")
        return found
    if system is None:
        raise ValueError(f"an empty {kind} list needs an explicit dimension system")
    return system


def dim_combine(p: Monomial, ws, system: DimSystem | None = None) -> DimVector:
    """Apply a monomial map to dimensions: the weighted sum of exponent vectors.

    The 0-input combination yields the zero (dimensionless) vector; `system`
    is only needed in that case.
    """
    ws = list(ws)
    if p.arity != len(ws):
        raise ArityMismatchError(f"{p.arity}-input combination applied to {len(ws)} dimensions")
    sys_ = _shared_system(ws, system, "dimension")
    exps = [_ZERO] * sys_.size
    for coeff, w in zip(p.exponents, ws):
        if coeff == 0:
            continue
        for i, e in enumerate(w.exponents):
            exps[i] += coeff * e
    return DimVector(sys_, tuple(exps))


def qty_combine(p: Monomial, xs, system: DimSystem | None = None) -> Quantity:
    """Apply a combination to quantities: x1^l1 * ... * xk^lk.

    Log magnitudes add with float exponent weights; the dimension part is
    exact. The 0-input combination returns the identity quantity 1.
    """
    xs = list(xs)
    if p.arity != len(xs):
        raise ArityMismatchError(f"{p.arity}-input combination applied to {len(xs)} quantities")
    sys_ = _shared_system(xs, system, "quantity")
    log_mag = 0.0
    for coeff, x in zip(p.exponents, xs):
        if coeff == 0:
            continue
        log_mag += float(coeff) * x.log_magnitude
    dim = dim_combine(p, [x.dim for x in xs], system=sys_)
    return Quantity(log_mag, dim)


def coordinate(x: Quantity, s: Quantity) -> float:
    """The unique positive a with x = a*s, for x and s of equal dimension."""
    if x.dim != s.dim:
        raise DimensionMismatchError(f"coordinate needs equal dimensions: {x.dim} vs {s.dim}")
    return math.exp(x.log_magnitude - s.log_magnitude)


def dimension_matrix(system: DimSystem, ws) -> QMatrix:
    """The d x n matrix whose column i holds the fundamental exponents of ws[i]."""
    ws = list(ws)
    for w in ws:
        if w.system != system:
            raise SystemMismatchError("dimension matrix inputs must share the given system")
    d, n = system.size, len(ws)
    flat = tuple(ws[i].exponents[j] for j in range(d) for i in range(n))
    return QMatrix(d, n, flat)
