"""Exact combinatorics, scalar JSON, linear algebra, special functions."""

from __future__ import annotations

import math
from fractions import Fraction

import pytest

from dfchaos.errors import DomainError, SingularSystemError
from dfchaos.numeric import (
    binom,
    binom_star,
    hyp1f1,
    k_subsets,
    log_gamma,
    multiplicity,
    nullspace,
    occupation_vectors,
    rising_factorial,
    scalar_from_json,
    scalar_to_json,
    solve_exact,
    sub_occupations,
    tuple_counts,
)

# reference values frozen from mpmath (30-digit working precision)
HYP1F1_REFERENCE = {
    (1, 2, 1.0): 1.7182818284590453,
    (0.5, 1.5, -1.0): 0.746824132812427,
    (2, 5, 0.75): 1.3653304981035232,
    (1.5, 4.0, 2.5): 2.9780330427030837,
    (1, 2, 2.0): 3.194528049465325,
    (3, 7, -2.0): 0.4504387282378557,
}
LOG_GAMMA_REFERENCE = {
    0.5: 0.5723649429247001,
    1.0: 0.0,
    3.7: 1.428072326665388,
    12.25: 18.115669505710894,
}


def test_binom_values():
    assert binom(6, 2) == 15
    assert binom(5, 0) == 1
    assert binom(5, 5) == 1
    assert binom(4, 7) == 0


def test_binom_star_gates_on_domain():
    assert binom_star(5, 2) == binom(5, 2)
    assert binom_star(2, 5) == 0
    assert binom_star(3, 3) == 1


def test_rising_factorial():
    assert rising_factorial(Fraction(3, 2), 3) == Fraction(3 * 5 * 7, 8)
    assert rising_factorial(4, 0) == 1
    assert rising_factorial(2, 3) == 24


def test_occupation_vectors_enumeration():
    vectors = list(occupation_vectors(3, 2))
    assert sorted(vectors) == [(0, 3), (1, 2), (2, 1), (3, 0)]
    assert len(list(occupation_vectors(4, 3))) == binom(4 + 2, 2)
    assert all(sum(v) == 4 for v in occupation_vectors(4, 3))


def test_multiplicity_counts_orderings():
    assert multiplicity((1, 1)) == 2
    assert multiplicity((2, 0)) == 1
    assert multiplicity((2, 1, 1)) == math.factorial(4) // 2


def test_tuple_counts():
    assert tuple_counts((1, 2, 1), 2) == (2, 1)
    assert tuple_counts((), 3) == (0, 0, 0)


def test_sub_occupations_with_ways():
    subs = dict(sub_occupations((2, 1), 2))
    # choose 2 of the three draws (two of atom 1, one of atom 2)
    assert subs == {(2, 0): 1, (1, 1): 2}
    assert dict(sub_occupations((2, 1), 0)) == {(0, 0): 1}


def test_k_subsets():
    assert len(list(k_subsets(4, 2))) == 6


def test_scalar_json_round_trip():
    for value in (Fraction(3, 4), Fraction(-7, 2), 5, 0.125):
        assert scalar_from_json(scalar_to_json(value)) == value
    assert scalar_to_json(Fraction(3, 4)) == "3/4"
    assert scalar_from_json("3/4") == Fraction(3, 4)


def test_solve_exact_small_system():
    # x + 2y = 5, 3x + 4y = 11  ->  x = 1, y = 2
    solution = solve_exact(
        [[Fraction(1), Fraction(2)], [Fraction(3), Fraction(4)]],
        [Fraction(5), Fraction(11)],
    )
    assert solution == [Fraction(1), Fraction(2)]


def test_solve_exact_rejects_singular():
    with pytest.raises(SingularSystemError):
        solve_exact(
            [[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]],
            [Fraction(1), Fraction(1)],
        )


def test_nullspace_rank_one():
    basis = nullspace([[Fraction(1), Fraction(1)]])
    assert len(basis) == 1
    x, y = basis[0]
    assert x + y == 0 and (x, y) != (0, 0)


def test_hyp1f1_matches_reference():
    for (a, b, z), expected in HYP1F1_REFERENCE.items():
        assert hyp1f1(a, b, z) == pytest.approx(expected, rel=1e-13)


def test_hyp1f1_rejects_nonpositive_integer_denominator():
    with pytest.raises(DomainError):
        hyp1f1(1.0, 0.0, 1.0)


def test_log_gamma_matches_reference():
    for x, expected in LOG_GAMMA_REFERENCE.items():
        assert log_gamma(x) == pytest.approx(expected, abs=1e-12)
