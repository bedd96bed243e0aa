"""Shared generators, oracles, and CLI drivers for the test suite."""

from __future__ import annotations

import os
import random
import subprocess
import sys
from fractions import Fraction
from itertools import product
from pathlib import Path

from piforge.core import DimSystem, DimVector, Quantity
from piforge.exactlin import QMatrix, rref

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"
GOLDENS = Path(__file__).resolve().parent / "goldens"


def mass_spring_dims():
    system = DimSystem(("M", "T"))
    m = DimVector.unit(system, "M")
    t = DimVector.unit(system, "T")
    return system, (m, m / t**2, t)


def kinematics_dims():
    system = DimSystem(("L", "T"))
    length = DimVector.unit(system, "L")
    time = DimVector.unit(system, "T")
    return system, (length, time, length / time)


def random_dims(rng: random.Random, max_n=8, max_d=4, lo=-3, hi=3, min_n=1):
    """A random dimension system and dimension list with integer exponents."""
    d = rng.randint(1, max_d)
    n = rng.randint(min_n, max_n)
    system = DimSystem(tuple(f"D{i}" for i in range(d)))
    dims = tuple(
        DimVector(system, tuple(Fraction(rng.randint(lo, hi)) for _ in range(d)))
        for _ in range(n)
    )
    return system, dims


def random_quantities(rng: random.Random, dims, lo=1e-3, hi=1e3):
    import math

    return [
        Quantity(rng.uniform(math.log(lo), math.log(hi)), dim) for dim in dims
    ]


def random_matrix(rng: random.Random, rows: int, cols: int, lo=-3, hi=3) -> QMatrix:
    return QMatrix.from_rows(
        [[rng.randint(lo, hi) for _ in range(cols)] for _ in range(rows)]
    )


def random_invertible(rng: random.Random, n: int, lo=-2, hi=2) -> QMatrix:
    while True:
        m = random_matrix(rng, n, n, lo, hi)
        if rref(m)[2] == n:
            return m


def apply_change_of_basis(matrix: QMatrix, groups):
    """New group i = sum_j matrix[i][j] * groups[j], on coefficient vectors."""
    from piforge.core import Monomial

    n = groups[0].arity
    out = []
    for i in range(matrix.rows):
        coeffs = [Fraction(0)] * n
        for j, g in enumerate(groups):
            factor = matrix.at(i, j)
            if factor == 0:
                continue
            for k in range(n):
                coeffs[k] += factor * g.exponents[k]
        out.append(Monomial(tuple(coeffs)))
    return tuple(out)


def brute_force_integer_kernel(matrix: QMatrix, bound: int):
    """All nonzero integer vectors v with entries in [-bound, bound] and m v = 0."""
    hits = []
    for candidate in product(range(-bound, bound + 1), repeat=matrix.cols):
        if all(c == 0 for c in candidate):
            continue
        if all(v == 0 for v in matrix.mul_vec(candidate)):
            hits.append(candidate)
    return hits


ROOT = Path(__file__).resolve().parents[1]


def run_cli(*argv, env_extra=None):
    """Run the CLI as a subprocess from the repo root, registry env cleared."""
    env = os.environ.copy()
    env.pop("PIFORGE_REGISTRY", None)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "piforge.cli", *argv],
        cwd=ROOT,
        capture_output=True,
        env=env,
    )


# (golden file, argv, expected exit code) — pinned CLI behavior
GOLDEN_CASES = [
    ("pi_mass_spring.txt", ["pi", "--spec", "fixtures/mass_spring.json"], 0),
    ("pi_mass_spring.json", ["pi", "--spec", "fixtures/mass_spring.json", "--json"], 0),
    ("pi_independent_dims.txt", ["pi", "--spec", "fixtures/independent_dims.json"], 0),
    ("pi_electronics.txt", ["pi", "--spec", "fixtures/electronics.json"], 0),
    (
        "consistent_electronics.txt",
        ["consistent", "V", "A", "ohm", "s", "F", "--registry", "fixtures/registry.json"],
        0,
    ),
    (
        "consistent_electronics.json",
        ["consistent", "V", "A", "ohm", "s", "F", "--registry", "fixtures/registry.json", "--json"],
        0,
    ),
    (
        "consistent_clash.txt",
        ["consistent", "cm", "hr", "knot", "--registry", "fixtures/registry.json"],
        1,
    ),
    (
        "consistent_clash.json",
        ["consistent", "cm", "hr", "knot", "--registry", "fixtures/registry.json", "--json"],
        1,
    ),
    (
        "verify_newton.txt",
        ["verify", "--spec", "fixtures/newton.json", "--trials", "10000", "--seed", "0"],
        0,
    ),
    (
        "verify_hidden_constant.txt",
        ["verify", "--spec", "fixtures/hidden_constant.json", "--trials", "10000", "--seed", "0"],
        1,
    ),
    (
        "verify_hidden_constant.json",
        ["verify", "--spec", "fixtures/hidden_constant.json", "--trials", "10000", "--seed", "0", "--json"],
        1,
    ),
    (
        "verify_light_three_var.txt",
        ["verify", "--spec", "fixtures/light_three_var.json", "--trials", "10000", "--seed", "0"],
        0,
    ),
    (
        "nondim_mass_spring.txt",
        ["nondim", "--spec", "fixtures/mass_spring.json", "fixtures/mass_spring_bindings.json"],
        0,
    ),
]
