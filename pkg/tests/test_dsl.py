import math
import random
from fractions import Fraction

import pytest

from piforge import dsl
from piforge.core import DimSystem, DimVector, Quantity
from piforge.dsl import (
    BOOL,
    BinOp,
    Call,
    Compare,
    Const,
    Pow,
    Var,
    evaluate,
    free_variables,
    parse_dimension,
    parse_quantity,
    parse_relation,
    print_dimension,
    print_relation,
    typecheck,
)
from piforge.errors import (
    DimensionError,
    ParseError,
    SpecError,
    UnknownFundamentalError,
    UnknownUnitError,
)
from piforge.harness import Rescaling, rescale

from support import FIXTURES, mass_spring_dims, random_dims, random_quantities


@pytest.fixture
def mt():
    return DimSystem(("M", "T"))


class TestDimensionParsing:
    def test_product_with_negative_power(self, mt):
        vec = parse_dimension("M*T^-2", mt)
        assert vec.exponents == (Fraction(1), Fraction(-2))

    def test_fractional_power(self):
        system = DimSystem(("L",))
        assert parse_dimension("L^(1/2)", system).exponents == (Fraction(1, 2),)

    def test_one_is_dimensionless(self, mt):
        assert parse_dimension("1", mt).is_zero()

    def test_quotient_and_parens(self, mt):
        assert parse_dimension("M/(T*T)", mt) == parse_dimension("M*T^-2", mt)

    def test_unknown_fundamental(self, mt):
        with pytest.raises(UnknownFundamentalError):
            parse_dimension("L", mt)

    def test_garbage_rejected(self, mt):
        for bad in ("M*", "M^", "M^1.5", "2", "M$T", "(M", "M^(1/0)"):
            with pytest.raises(ParseError):
                parse_dimension(bad, mt)

    def test_round_trip(self, mt):
        corpus = ["M*T^-2", "1", "M", "T^(1/2)", "M^3*T^(-5/2)"]
        for text in corpus:
            vec = parse_dimension(text, mt)
            assert parse_dimension(print_dimension(vec), mt) == vec


class TestQuantityParsing:
    def test_newton_literal(self, registry):
        q = parse_quantity("3 kg*m/s^2", registry)
        assert q.magnitude == pytest.approx(3.0, rel=1e-12)
        assert q.dim == parse_dimension("M*L*T^-2", registry.system)

    def test_coherent_base_unit(self, registry):
        q = parse_quantity("1 s", registry)
        assert q.log_magnitude == pytest.approx(0.0, abs=1e-15)

    def test_knot_literal(self, registry):
        q = parse_quantity("2.5 knot", registry)
        assert q.magnitude * 3600 / 0.01 == pytest.approx(2.5 * 185200, rel=1e-9)
        assert q.dim == parse_dimension("L*T^-1", registry.system)

    def test_dimensionless_unit_term(self, registry):
        q = parse_quantity("42 1", registry)
        assert q.dim.is_zero()
        assert q.magnitude == pytest.approx(42.0, rel=1e-12)

    def test_rejects_nonpositive_and_unknown(self, registry):
        with pytest.raises(ParseError):
            parse_quantity("0 kg", registry)
        with pytest.raises(ParseError):
            parse_quantity("-3 kg", registry)
        with pytest.raises(UnknownUnitError):
            parse_quantity("3 parsec", registry)


class TestRelationParsing:
    def test_precedence_shape(self):
        node = parse_relation("a + b * c^2 = d and not e < f or g <= h")
        assert node == dsl.BoolOp(
            "or",
            dsl.BoolOp(
                "and",
                Compare("=", BinOp("+", Var("a"), BinOp("*", Var("b"), Pow(Var("c"), Fraction(2)))), Var("d")),
                dsl.Not(Compare("<", Var("e"), Var("f"))),
            ),
            Compare("<=", Var("g"), Var("h")),
        )

    def test_pi_constant(self):
        node = parse_relation("x = 2*pi")
        assert node == Compare("=", Var("x"), BinOp("*", Const(2.0), Const(math.pi, "pi")))

    def test_unknown_function(self):
        with pytest.raises(ParseError):
            parse_relation("tan(x) = y")

    def test_keywords_are_not_variables(self):
        with pytest.raises(ParseError):
            parse_relation("and = x")

    def test_free_variables(self):
        node = parse_relation("is_pos_int(t/(2*pi) * (k/m)^(1/2))")
        assert free_variables(node) == {"t", "k", "m"}

    def test_round_trip_corpus(self):
        corpus = [
            "F = m*a",
            "is_pos_int(t/(2*pi) * (k/m)^(1/2))",
            "x = 299792458.0*t",
            "a + b < c or not d = e and f <= g",
            "sqrt(x)*y^(-3/2) = exp(z) or is_pos_int(w)",
            "x^2^3 = y",
            "(a + b)*c = d",
        ]
        for text in corpus:
            node = parse_relation(text)
            assert parse_relation(print_relation(node)) == node


class TestTypecheck:
    def test_mass_spring_group_is_dimensionless(self):
        system, dims = mass_spring_dims()
        env = {"m": dims[0], "k": dims[1], "t": dims[2]}
        node = parse_relation("m^(-1/2) * k^(1/2) * t")
        assert typecheck(node, env).is_zero()

    def test_addition_mismatch(self):
        system = DimSystem(("M", "T"))
        env = {"m": DimVector.unit(system, "M"), "t": DimVector.unit(system, "T")}
        with pytest.raises(DimensionError) as info:
            typecheck(parse_relation("m + t"), env)
        assert info.value.left != info.value.right

    def test_mass_spring_predicate_is_boolean(self):
        system, dims = mass_spring_dims()
        env = {"m": dims[0], "k": dims[1], "t": dims[2]}
        node = parse_relation("is_pos_int(t/(2*pi) * (k/m)^(1/2))")
        assert typecheck(node, env) is BOOL

    def test_transcendentals_demand_dimensionless(self):
        system = DimSystem(("T",))
        env = {"t": DimVector.unit(system, "T")}
        with pytest.raises(DimensionError):
            typecheck(parse_relation("exp(t) = t/t"), env)
        assert typecheck(parse_relation("exp(t/t) = t/t"), env) is BOOL

    def test_sqrt_halves_any_dimension(self):
        system = DimSystem(("L",))
        env = {"x": DimVector.unit(system, "L")}
        result = typecheck(parse_relation("sqrt(x)"), env)
        assert result.exponents == (Fraction(1, 2),)

    def test_mixed_comparison_strict_vs_fuzz(self):
        system = DimSystem(("L", "T"))
        env = {"x": DimVector.unit(system, "L"), "t": DimVector.unit(system, "T")}
        node = parse_relation("x = 299792458*t")
        with pytest.raises(DimensionError):
            typecheck(node, env)
        assert typecheck(node, env, allow_mixed_comparisons=True) is BOOL

    def test_mixed_add_rejected_even_for_fuzzing(self):
        system = DimSystem(("L", "T"))
        env = {"x": DimVector.unit(system, "L"), "t": DimVector.unit(system, "T")}
        with pytest.raises(DimensionError):
            typecheck(parse_relation("x + t = x"), env, allow_mixed_comparisons=True)

    def test_boolean_operand_misuse(self):
        system = DimSystem(("L",))
        env = {"x": DimVector.unit(system, "L")}
        with pytest.raises(DimensionError):
            typecheck(parse_relation("(x = x) + x"), env)
        with pytest.raises(DimensionError):
            typecheck(parse_relation("x and x = x"), env)

    def test_verdict_ignores_magnitudes(self):
        # typecheck sees only the environment's dims; no magnitudes exist here.
        system, dims = mass_spring_dims()
        env = {"m": dims[0], "k": dims[1], "t": dims[2]}
        node = parse_relation("t^2*k/m")
        assert typecheck(node, env).is_zero()


class TestEvaluate:
    @pytest.fixture
    def spring_bindings(self):
        system, dims = mass_spring_dims()
        return {
            "m": Quantity.from_magnitude(1.0, dims[0]),
            "k": Quantity.from_magnitude(4 * math.pi**2, dims[1]),
            "t": Quantity.from_magnitude(1.0, dims[2]),
        }

    def test_mass_spring_true_at_full_period(self, spring_bindings):
        node = parse_relation("is_pos_int(t/(2*pi) * (k/m)^(1/2))")
        assert evaluate(node, spring_bindings) is True

    def test_mass_spring_false_between_periods(self, spring_bindings):
        node = parse_relation("is_pos_int(t/(2*pi) * (k/m)^(1/2))")
        bindings = dict(spring_bindings)
        bindings["t"] = Quantity.from_magnitude(1.5, bindings["t"].dim)
        assert evaluate(node, bindings) is False

    def test_self_ratio_is_dimensionless_one(self, spring_bindings):
        result = evaluate(parse_relation("m/m"), spring_bindings)
        assert isinstance(result, Quantity)
        assert result.dim.is_zero()
        assert result.magnitude == pytest.approx(1.0, rel=1e-15)

    def test_addition_in_linear_space(self, spring_bindings):
        result = evaluate(parse_relation("m + m + m"), spring_bindings)
        assert result.magnitude == pytest.approx(3.0, rel=1e-12)

    def test_subtraction_legal_inside_comparison(self, spring_bindings):
        # m - 2m is negative; only the comparison consumes it.
        assert evaluate(parse_relation("m - 2*m < m"), spring_bindings) is True

    def test_equality_uses_relative_tolerance(self):
        system = DimSystem(("L",))
        dim = DimVector.unit(system, "L")
        a = Quantity.from_magnitude(1e10, dim)
        b = Quantity.from_magnitude(1e10 * (1 + 1e-12), dim)
        env = {"a": a, "b": b}
        assert evaluate(parse_relation("a = b"), env) is True
        c = Quantity.from_magnitude(1e10 * (1 + 1e-6), dim)
        assert evaluate(parse_relation("a = b"), {"a": a, "b": c}) is False

    def test_progress_on_random_well_typed_expressions(self):
        rng = random.Random(41)
        checked = 0
        for _ in range(300):
            system, dims = random_dims(rng, max_n=4, max_d=3, lo=-2, hi=2, min_n=2)
            names = [f"x{i}" for i in range(len(dims))]
            env = dict(zip(names, dims))
            node = _random_predicate(rng, names, depth=rng.randint(1, 5))
            try:
                result_type = typecheck(node, env)
            except DimensionError:
                continue
            if result_type is not BOOL:
                continue
            bindings = dict(zip(names, random_quantities(rng, dims, lo=0.5, hi=2.0)))
            assert evaluate(node, bindings) in (True, False)
            checked += 1
        assert checked >= 100

    def test_dimensionless_expressions_commute_with_rescaling(self):
        # the g(pi(...)) structure: dimensionless-closed values are invariant
        rng = random.Random(43)
        from piforge.pigroups import pi_basis

        count = 0
        for _ in range(200):
            system, dims = random_dims(rng, max_n=5, max_d=3, lo=-2, hi=2, min_n=2)
            basis = pi_basis(dims)
            if basis.r == 0:
                continue
            group = basis.groups[rng.randrange(basis.r)]
            names = [f"x{i}" for i in range(len(dims))]
            node = _monomial_node(names, group.exponents)
            bindings = dict(zip(names, random_quantities(rng, dims)))
            before = evaluate(node, bindings)
            factors = Rescaling(
                system, tuple(rng.uniform(math.log(1e-2), math.log(1e2)) for _ in system.names)
            )
            after_values = rescale([bindings[n] for n in names], factors)
            after = evaluate(node, dict(zip(names, after_values)))
            assert after.log_magnitude == pytest.approx(before.log_magnitude, abs=1e-9)
            count += 1
        assert count >= 50


def _monomial_node(names, coefficients):
    node = None
    for name, c in zip(names, coefficients):
        if c == 0:
            continue
        factor = Var(name) if c == 1 else Pow(Var(name), c)
        node = factor if node is None else BinOp("*", node, factor)
    return node if node is not None else Const(1.0)


def _random_predicate(rng, names, depth):
    if depth <= 1:
        kind = rng.randrange(3)
        left = _random_term(rng, names, 2)
        if kind == 0:
            return Compare(rng.choice(["=", "<", "<="]), left, _random_term(rng, names, 2))
        if kind == 1:
            return Compare("<", left, BinOp("*", left, Const(2.0)))
        ratio = BinOp("/", left, left)
        return Call("is_pos_int", ratio)
    kind = rng.randrange(3)
    if kind == 0:
        return dsl.Not(_random_predicate(rng, names, depth - 1))
    op = rng.choice(["and", "or"])
    return dsl.BoolOp(
        op,
        _random_predicate(rng, names, depth - 1),
        _random_predicate(rng, names, depth - 1),
    )


def _random_term(rng, names, depth):
    if depth <= 0 or rng.random() < 0.4:
        if rng.random() < 0.3:
            return Const(rng.choice([0.5, 1.0, 2.0, 3.5]))
        return Var(rng.choice(names))
    kind = rng.randrange(4)
    if kind == 0:
        return BinOp(rng.choice(["*", "/"]), _random_term(rng, names, depth - 1), _random_term(rng, names, depth - 1))
    if kind == 1:
        return Pow(_random_term(rng, names, depth - 1), Fraction(rng.randint(-2, 2)))
    if kind == 2:
        return Call("sqrt", _random_term(rng, names, depth - 1))
    left = _random_term(rng, names, depth - 1)
    return BinOp("+", left, left)


class TestProblemSpec:
    def test_load_mass_spring(self):
        spec = dsl.load_problem_spec(FIXTURES / "mass_spring.json")
        assert spec.variable_names == ("m", "k", "t")
        assert spec.system.names == ("M", "T")
        assert typecheck(spec.relation, spec.env) is BOOL

    def test_missing_keys(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"system": ["M"]}')
        with pytest.raises(SpecError):
            dsl.load_problem_spec(bad)

    def test_undeclared_variable(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"system": ["M"], "variables": {"m": "M"}, "relation": "m = q"}')
        with pytest.raises(SpecError):
            dsl.load_problem_spec(bad)

    def test_unreadable(self, tmp_path):
        with pytest.raises(SpecError):
            dsl.load_problem_spec(tmp_path / "nope.json")
