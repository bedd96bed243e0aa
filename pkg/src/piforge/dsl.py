"""Surface syntax: dimension expressions, quantity literals, and relations.

Three small languages share one tokenizer:

  dimension   M*L^2*T^-2      products/quotients of fundamentals with exact
                              rational powers; "1" is dimensionless
  quantity    3.5 kg*m/s^2    positive decimal magnitude times a unit
                              expression resolved against a registry
  relation    F = m*a         typed predicate over dimensioned variables

Relations are parsed to an immutable AST, dimension-checked by `typecheck`
(add/sub/compare demand equal dimensions; exp/log/sin/cos and is_pos_int
demand dimensionless operands; pow takes a rational literal; sqrt halves any
dimension), and run by `evaluate`. Evaluation keeps multiplicative chains in
log space and drops to linear space only where sums, transcendentals, or
comparisons force it; non-positive intermediates are legal there and only
there.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .core import DimSystem, DimVector, Quantity
from .errors import (
    DimensionError,
    EvaluationError,
    ParseError,
    SpecError,
    UnknownFundamentalError,
)

DEFAULT_TOL = 1e-9

FUNCTIONS = ("exp", "log", "sin", "cos", "sqrt", "is_pos_int")
_DIMENSIONLESS_ONLY = ("exp", "log", "sin", "cos", "is_pos_int")


# --- AST ---------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: float
    symbol: str | None = None  # "pi" prints by name


@dataclass(frozen=True)
class BinOp:
    op: str  # + - * /
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: Fraction


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


@dataclass(frozen=True)
class Compare:
    op: str  # = < <=
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class BoolOp:
    op: str  # and or
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Not:
    operand: "Node"


Node = Var | Const | BinOp | Pow | Call | Compare | BoolOp | Not


class BoolType:
    """Singleton type of predicates, distinct from every DimVector."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "BoolType"


BOOL = BoolType()


# --- tokenizer ----------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<number>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op><=|=|<|\^|\*|/|\+|-|\(|\)))"
)


@dataclass(frozen=True)
class _Token:
    kind: str  # number | name | op | end
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            rest = text[pos:].lstrip()
            if not rest:
                break
            raise ParseError(f"unexpected character {rest[0]!r} at position {pos}")
        pos = m.end()
        for kind in ("number", "name", "op"):
            value = m.group(kind)
            if value is not None:
                tokens.append(_Token(kind, value, m.start()))
                break
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _TokenStream:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.index = 0

    def peek(self) -> _Token:
        return self.tokens[self.index]

    def next(self) -> _Token:
        tok = self.tokens[self.index]
        if tok.kind != "end":
            self.index += 1
        return tok

    def expect(self, text: str) -> _Token:
        tok = self.next()
        if tok.text != text:
            raise ParseError(f"expected {text!r}, got {tok.text or 'end of input'!r} in {self.text!r}")
        return tok

    def at_end(self) -> bool:
        return self.peek().kind == "end"


def _parse_rational(ts: _TokenStream) -> Fraction:
    """Rational literal after '^': int, -int, or (int/int) with optional signs."""
    tok = ts.peek()
    if tok.text == "(":
        ts.next()
        num = _parse_signed_int(ts)
        if ts.peek().text == "/":
            ts.next()
            den = _parse_signed_int(ts)
            if den == 0:
                raise ParseError("zero denominator in exponent")
            value = Fraction(num, den)
        else:
            value = Fraction(num)
        ts.expect(")")
        return value
    return Fraction(_parse_signed_int(ts))


def _parse_signed_int(ts: _TokenStream) -> int:
    sign = 1
    if ts.peek().text == "-":
        ts.next()
        sign = -1
    tok = ts.next()
    if tok.kind != "number" or not re.fullmatch(r"\d+", tok.text):
        raise ParseError(f"expected an integer exponent, got {tok.text!r}")
    return sign * int(tok.text)


# --- dimension expressions ----------------------------------------------


def parse_dimension(text: str, system: DimSystem) -> DimVector:
    """Parse a dimension expression over the system's fundamentals."""
    ts = _TokenStream(text)
    vec = _dim_expr(ts, system)
    if not ts.at_end():
        raise ParseError(f"trailing input {ts.peek().text!r} in dimension {text!r}")
    return vec


def _dim_expr(ts: _TokenStream, system: DimSystem) -> DimVector:
    vec = _dim_term(ts, system)
    while ts.peek().text in ("*", "/"):
        op = ts.next().text
        rhs = _dim_term(ts, system)
        vec = vec * rhs if op == "*" else vec / rhs
    return vec


def _dim_term(ts: _TokenStream, system: DimSystem) -> DimVector:
    tok = ts.next()
    if tok.text == "(":
        vec = _dim_expr(ts, system)
        ts.expect(")")
    elif tok.kind == "number":
        if tok.text != "1":
            raise ParseError(f"the only numeric dimension term is 1, got {tok.text!r}")
        vec = DimVector.zero(system)
    elif tok.kind == "name":
        if tok.text not in system.names:
            raise UnknownFundamentalError(
                f"unknown fundamental {tok.text!r} (system: {', '.join(system.names)})"
            )
        vec = DimVector.unit(system, tok.text)
    else:
        raise ParseError(f"unexpected {tok.text or 'end of input'!r} in dimension expression")
    while ts.peek().text == "^":
        ts.next()
        vec = vec ** _parse_rational(ts)
    return vec


def print_dimension(vec: DimVector) -> str:
    """Normalized dimension text; parse(print(v)) == v."""
    return str(vec)


# --- quantity literals --------------------------------------------------


def parse_quantity(text: str, registry) -> Quantity:
    """Parse "<decimal> <unit expression>" against a registry.

    The registry only needs `system` and `quantity(name) -> Quantity`.
    Magnitudes must be strictly positive.
    """
    ts = _TokenStream(text)
    tok = ts.next()
    if tok.kind != "number":
        raise ParseError(f"a quantity literal starts with a decimal magnitude: {text!r}")
    magnitude = float(tok.text)
    if magnitude <= 0:
        raise ParseError(f"quantity magnitudes must be positive, got {tok.text}")
    unit = _unit_expr(ts, registry)
    if not ts.at_end():
        raise ParseError(f"trailing input {ts.peek().text!r} in quantity {text!r}")
    return Quantity(math.log(magnitude) + unit.log_magnitude, unit.dim)


def _unit_expr(ts: _TokenStream, registry) -> Quantity:
    q = _unit_term(ts, registry)
    while ts.peek().text in ("*", "/"):
        op = ts.next().text
        rhs = _unit_term(ts, registry)
        q = q * rhs if op == "*" else q / rhs
    return q


def _unit_term(ts: _TokenStream, registry) -> Quantity:
    tok = ts.next()
    if tok.text == "(":
        q = _unit_expr(ts, registry)
        ts.expect(")")
    elif tok.kind == "number":
        if tok.text != "1":
            raise ParseError(f"the only numeric unit term is 1, got {tok.text!r}")
        q = Quantity.one(registry.system)
    elif tok.kind == "name":
        q = registry.quantity(tok.text)
    else:
        raise ParseError(f"unexpected {tok.text or 'end of input'!r} in unit expression")
    while ts.peek().text == "^":
        ts.next()
        q = q ** _parse_rational(ts)
    return q


# --- relation expressions -----------------------------------------------


def parse_relation(text: str) -> Node:
    ts = _TokenStream(text)
    node = _or_expr(ts)
    if not ts.at_end():
        raise ParseError(f"trailing input {ts.peek().text!r} in relation {text!r}")
    return node


def _or_expr(ts: _TokenStream) -> Node:
    node = _and_expr(ts)
    while ts.peek().text == "or":
        ts.next()
        node = BoolOp("or", node, _and_expr(ts))
    return node


def _and_expr(ts: _TokenStream) -> Node:
    node = _not_expr(ts)
    while ts.peek().text == "and":
        ts.next()
        node = BoolOp("and", node, _not_expr(ts))
    return node


def _not_expr(ts: _TokenStream) -> Node:
    if ts.peek().text == "not":
        ts.next()
        return Not(_not_expr(ts))
    return _comparison(ts)


def _comparison(ts: _TokenStream) -> Node:
    left = _additive(ts)
    if ts.peek().text in ("=", "<", "<="):
        op = ts.next().text
        right = _additive(ts)
        return Compare(op, left, right)
    return left


def _additive(ts: _TokenStream) -> Node:
    node = _multiplicative(ts)
    while ts.peek().text in ("+", "-"):
        op = ts.next().text
        node = BinOp(op, node, _multiplicative(ts))
    return node


def _multiplicative(ts: _TokenStream) -> Node:
    node = _power(ts)
    while ts.peek().text in ("*", "/"):
        op = ts.next().text
        node = BinOp(op, node, _power(ts))
    return node


def _power(ts: _TokenStream) -> Node:
    node = _primary(ts)
    while ts.peek().text == "^":
        ts.next()
        node = Pow(node, _parse_rational(ts))
    return node


def _primary(ts: _TokenStream) -> Node:
    tok = ts.next()
    if tok.text == "(":
        node = _or_expr(ts)
        ts.expect(")")
        return node
    if tok.kind == "number":
        value = float(tok.text)
        if value <= 0:
            raise ParseError(f"constants must be positive, got {tok.text}")
        return Const(value)
    if tok.kind == "name":
        if tok.text == "pi":
            return Const(math.pi, "pi")
        if ts.peek().text == "(":
            if tok.text not in FUNCTIONS:
                raise ParseError(
                    f"unknown function {tok.text!r} (have: {', '.join(FUNCTIONS)})"
                )
            ts.next()
            arg = _or_expr(ts)
            ts.expect(")")
            return Call(tok.text, arg)
        if tok.text in ("and", "or", "not"):
            raise ParseError(f"{tok.text!r} is a keyword, not a variable")
        return Var(tok.text)
    raise ParseError(f"unexpected {tok.text or 'end of input'!r} in relation")


def free_variables(node: Node) -> set[str]:
    match node:
        case Var(name):
            return {name}
        case Const():
            return set()
        case BinOp(_, left, right) | Compare(_, left, right) | BoolOp(_, left, right):
            return free_variables(left) | free_variables(right)
        case Pow(base, _):
            return free_variables(base)
        case Call(_, arg):
            return free_variables(arg)
        case Not(operand):
            return free_variables(operand)
    raise TypeError(f"not a relation node: {node!r}")


# --- printer -------------------------------------------------------------

_PRECEDENCE = {"or": 1, "and": 2, "not": 3, "cmp": 4, "+": 5, "-": 5, "*": 6, "/": 6, "pow": 7}


def _prec(node: Node) -> int:
    match node:
        case BoolOp(op, _, _):
            return _PRECEDENCE[op]
        case Not(_):
            return _PRECEDENCE["not"]
        case Compare(_, _, _):
            return _PRECEDENCE["cmp"]
        case BinOp(op, _, _):
            return _PRECEDENCE[op]
        case Pow(_, _):
            return _PRECEDENCE["pow"]
    return 9


def _wrap(child: Node, parent_prec: int, right_side: bool = False) -> str:
    text = print_relation(child)
    child_prec = _prec(child)
    if child_prec < parent_prec or (right_side and child_prec == parent_prec):
        return f"({text})"
    return text


def print_relation(node: Node) -> str:
    """Render an AST back to source; parse(print(n)) == n."""
    match node:
        case Var(name):
            return name
        case Const(value, symbol):
            return symbol if symbol else repr(value)
        case BinOp(op, left, right):
            p = _PRECEDENCE[op]
            return f"{_wrap(left, p)} {op} {_wrap(right, p, right_side=True)}"
        case Pow(base, exponent):
            if exponent.denominator == 1 and exponent >= 0:
                etext = str(exponent)
            else:
                etext = f"({exponent})"
            return f"{_wrap(base, _PRECEDENCE['pow'], right_side=True)}^{etext}"
        case Call(func, arg):
            return f"{func}({print_relation(arg)})"
        case Compare(op, left, right):
            p = _PRECEDENCE["cmp"]
            return f"{_wrap(left, p)} {op} {_wrap(right, p, right_side=True)}"
        case BoolOp(op, left, right):
            p = _PRECEDENCE[op]
            return f"{_wrap(left, p)} {op} {_wrap(right, p, right_side=True)}"
        case Not(operand):
            return f"not {_wrap(operand, _PRECEDENCE['not'])}"
    raise TypeError(f"not a relation node: {node!r}")


# --- typecheck -----------------------------------------------------------


def typecheck(node: Node, env: dict[str, DimVector], *, allow_mixed_comparisons: bool = False):
    """Dimension-check a relation; returns its DimVector or BOOL.

    The verdict depends only on the environment's dimensions, never on
    magnitudes. With allow_mixed_comparisons the =/</<= operators accept
    operands of different dimensions (the invariance fuzzer's loophole);
    everything else stays strict.
    """
    system = next(iter(env.values())).system if env else None

    def check(n: Node):
        match n:
            case Var(name):
                if name not in env:
                    raise DimensionError(f"unbound variable {name!r}", node=n)
                return env[name]
            case Const():
                if system is None:
                    raise DimensionError("no dimension system in scope", node=n)
                return DimVector.zero(system)
            case BinOp(op, left, right):
                lt, rt = check(left), check(right)
                _need_dim(n, lt), _need_dim(n, rt)
                if op in ("+", "-"):
                    if lt != rt:
                        raise DimensionError(
                            f"'{op}' needs equal dimensions: {lt} vs {rt}",
                            node=n, left=lt, right=rt,
                        )
                    return lt
                return lt * rt if op == "*" else lt / rt
            case Pow(base, exponent):
                bt = _need_dim(n, check(base))
                return bt**exponent
            case Call(func, arg):
                at = _need_dim(n, check(arg))
                if func == "sqrt":
                    return at ** Fraction(1, 2)
                if not at.is_zero():
                    raise DimensionError(
                        f"{func} needs a dimensionless operand, got {at}",
                        node=n, left=at,
                    )
                return BOOL if func == "is_pos_int" else at
            case Compare(op, left, right):
                lt, rt = check(left), check(right)
                _need_dim(n, lt), _need_dim(n, rt)
                if lt != rt and not allow_mixed_comparisons:
                    raise DimensionError(
                        f"'{op}' compares different dimensions: {lt} vs {rt}",
                        node=n, left=lt, right=rt,
                    )
                return BOOL
            case BoolOp(op, left, right):
                for side in (left, right):
                    if check(side) is not BOOL:
                        raise DimensionError(f"'{op}' needs boolean operands", node=n)
                return BOOL
            case Not(operand):
                if check(operand) is not BOOL:
                    raise DimensionError("'not' needs a boolean operand", node=n)
                return BOOL
        raise TypeError(f"not a relation node: {n!r}")

    return check(node)


def _need_dim(node: Node, t):
    if t is BOOL:
        raise DimensionError("boolean value used where a quantity is required", node=node)
    return t


# --- evaluate ------------------------------------------------------------


@dataclass(frozen=True)
class _Linear:
    """A linear-space intermediate that may be non-positive (sums, sin/cos).

    It can flow into comparisons as-is; re-entering a multiplicative context
    requires a positive value.
    """

    value: float
    dim: DimVector


def _to_quantity(v, node: Node) -> Quantity:
    if isinstance(v, Quantity):
        return v
    if isinstance(v, _Linear):
        if v.value > 0 and math.isfinite(v.value):
            return Quantity(math.log(v.value), v.dim)
        raise EvaluationError(
            f"non-positive value {v.value!r} in multiplicative context: {print_relation(node)}"
        )
    raise EvaluationError(f"boolean used as a quantity in {print_relation(node)}")


def _to_linear(v) -> _Linear:
    if isinstance(v, Quantity):
        return _Linear(v.magnitude, v.dim)
    return v


def evaluate(node: Node, bindings: dict[str, Quantity], tol: float = DEFAULT_TOL):
    """Evaluate a typechecked relation against quantity bindings.

    Returns a bool for predicates, a Quantity otherwise. Equality compares
    with relative tolerance tol; is_pos_int accepts values within tol of a
    positive integer.
    """
    system = next(iter(bindings.values())).dim.system if bindings else None

    def run(n: Node):
        match n:
            case Var(name):
                return bindings[name]
            case Const(value, _):
                return Quantity(math.log(value), DimVector.zero(system))
            case BinOp(op, left, right):
                if op in ("*", "/"):
                    lq = _to_quantity(run(left), left)
                    rq = _to_quantity(run(right), right)
                    return lq * rq if op == "*" else lq / rq
                lv, rv = _to_linear(run(left)), _to_linear(run(right))
                value = lv.value + rv.value if op == "+" else lv.value - rv.value
                return _Linear(value, lv.dim)
            case Pow(base, exponent):
                return _to_quantity(run(base), base) ** exponent
            case Call(func, arg):
                if func == "sqrt":
                    return _to_quantity(run(arg), arg) ** Fraction(1, 2)
                av = _to_linear(run(arg)).value
                if func == "is_pos_int":
                    nearest = round(av)
                    return abs(av - nearest) <= tol and nearest >= 1
                if func == "exp":
                    return _Linear(math.exp(av), DimVector.zero(system))
                if func == "log":
                    if av <= 0:
                        raise EvaluationError(f"log of non-positive value {av!r}")
                    return _Linear(math.log(av), DimVector.zero(system))
                if func == "sin":
                    return _Linear(math.sin(av), DimVector.zero(system))
                return _Linear(math.cos(av), DimVector.zero(system))
            case Compare(op, left, right):
                lv, rv = _to_linear(run(left)), _to_linear(run(right))
                if op == "=":
                    return abs(lv.value - rv.value) <= tol * max(abs(lv.value), abs(rv.value))
                if op == "<":
                    return lv.value < rv.value
                return lv.value <= rv.value
            case BoolOp(op, left, right):
                if op == "and":
                    return run(left) and run(right)
                return run(left) or run(right)
            case Not(operand):
                return not run(operand)
        raise TypeError(f"not a relation node: {n!r}")

    result = run(node)
    if isinstance(result, _Linear):
        return _to_quantity(result, node)
    return result


# --- problem specs --------------------------------------------------------


@dataclass(frozen=True)
class ProblemSpec:
    """A parsed problem-spec file: a relation over declared dimensioned variables."""

    system: DimSystem
    variable_names: tuple[str, ...]
    variable_dims: tuple[DimVector, ...]
    relation: Node
    relation_text: str
    registry_path: str | None = None

    @property
    def env(self) -> dict[str, DimVector]:
        return dict(zip(self.variable_names, self.variable_dims))


def load_problem_spec(path) -> ProblemSpec:
    """Load and parse a problem-spec JSON file.

    Schema: { "system": [names...], "variables": {name: dim-expr},
              "relation": text, "registry": optional path }.
    Raises SpecError for anything unreadable or malformed.
    """
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise SpecError(f"cannot read spec {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SpecError(f"spec {path} is not valid JSON: {exc}") from exc
    return problem_spec_from_dict(raw, source=str(path))


def problem_spec_from_dict(raw: dict, source: str = "<dict>") -> ProblemSpec:
    if not isinstance(raw, dict):
        raise SpecError(f"spec {source}: expected a JSON object")
    for key in ("system", "variables", "relation"):
        if key not in raw:
            raise SpecError(f"spec {source}: missing key {key!r}")
    try:
        system = DimSystem(tuple(raw["system"]))
    except (TypeError, ValueError) as exc:
        raise SpecError(f"spec {source}: bad system: {exc}") from exc
    variables = raw["variables"]
    if not isinstance(variables, dict) or not variables:
        raise SpecError(f"spec {source}: 'variables' must be a nonempty object")
    names = tuple(variables.keys())
    try:
        dims = tuple(parse_dimension(expr, system) for expr in variables.values())
        relation = parse_relation(raw["relation"])
    except ParseError as exc:
        raise SpecError(f"spec {source}: {exc}") from exc
    unbound = free_variables(relation) - set(names)
    if unbound:
        raise SpecError(f"spec {source}: relation uses undeclared variables {sorted(unbound)}")
    return ProblemSpec(
        system=system,
        variable_names=names,
        variable_dims=dims,
        relation=relation,
        relation_text=raw["relation"],
        registry_path=raw.get("registry"),
    )
