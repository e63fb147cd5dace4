"""Projection coefficient tables, limits, oracle cross-checks, constants."""

from __future__ import annotations

from fractions import Fraction

import pytest

from dfchaos.coeffs import (
    c_iso,
    c_overlap,
    c_overlap_oracle,
    limit_coefficient,
    limit_coefficients,
    system_residuals,
    tabulated_limit_values,
    theta_limit,
    theta_table,
    validate_limit_values,
)
from dfchaos.chaos import statistic_product_mean
from dfchaos.errors import (
    CoefficientValidationError,
    ConvergenceError,
    DomainError,
)
from dfchaos.kernels import SymmetricKernel
from dfchaos.measures import measure
from dfchaos.numeric import binom


def test_theta_first_order_closed_form():
    for mass in (Fraction(1, 2), Fraction(1), Fraction(2), Fraction(5)):
        for N in (1, 2, 5, 12):
            table = theta_table(N, mass, max_k=1)
            assert table.theta(1, 1) == (mass + 1) / (N + mass)


def test_theta_table_frozen_row_mass_two_N_six():
    table = theta_table(6, 2)
    assert table.theta(1, 1) == Fraction(3, 8)
    assert table.theta(2, 1) == Fraction(-25, 24)
    assert table.theta(2, 2) == Fraction(5, 18)


def test_theta_star_scaling():
    table = theta_table(5, 2)
    for k in range(1, 6):
        for a in range(1, k + 1):
            assert table.theta_star(k, a) == table.theta(k, a) / binom(5 - a, k - a)


def test_system_residuals_vanish():
    for mass in (Fraction(1, 2), 3):
        for N in (1, 3, 5):
            residuals = system_residuals(theta_table(N, mass))
            assert all(value == 0 for value in residuals.values())


def test_theta_limit_matches_oracle():
    for mass in (Fraction(1, 2), Fraction(2)):
        for n, k in ((1, 1), (2, 1), (2, 2)):
            limit = theta_limit(n, k, mass)
            oracle = limit_coefficient(n, k, mass)
            assert limit.matches_oracle is True
            assert limit.value == pytest.approx(float(oracle), abs=1e-6)


def test_theta_limit_reports_divergence_budget():
    with pytest.raises(ConvergenceError) as excinfo:
        theta_limit(1, 1, 2, tol=1e-30, max_N=8)
    assert excinfo.value.partial is not None


def test_limit_coefficient_rows_mass_two():
    assert limit_coefficient(1, 1, 2) == 3
    assert limit_coefficient(2, 1, 2) == Fraction(-15, 2)
    assert limit_coefficient(2, 2, 2) == 10
    assert limit_coefficient(3, 1, 2) == 14
    assert limit_coefficient(3, 2, 2) == Fraction(-70, 3)
    assert limit_coefficient(3, 3, 2) == 35


def test_limit_coefficient_general_mass_row_two():
    for mass in (Fraction(1, 2), Fraction(1), Fraction(5)):
        assert limit_coefficient(1, 1, mass) == mass + 1
        assert limit_coefficient(2, 1, mass) == -(mass + 3) * (mass + 1) / 2
        assert limit_coefficient(2, 2, mass) == (mass + 3) * (mass + 2) / 2


def test_top_coefficient_inverts_isometry_constant():
    for mass in (Fraction(1, 2), Fraction(2)):
        for n in (1, 2, 3, 4):
            assert limit_coefficient(n, n, mass) == 1 / Fraction(c_iso(n, mass))


def test_tabulated_values_second_row_disagrees():
    mass = Fraction(2)
    published = tabulated_limit_values(mass)
    assert published[(1, 1)] == limit_coefficient(1, 1, mass)
    assert published[(2, 1)] != limit_coefficient(2, 1, mass)
    assert published[(2, 2)] != limit_coefficient(2, 2, mass)
    # the tabulated row even fails the defining projection conditions
    bad = dict(limit_coefficients(mass, 2))
    bad[(2, 1)] = Fraction(published[(2, 1)])
    bad[(2, 2)] = Fraction(published[(2, 2)])
    with pytest.raises(CoefficientValidationError):
        validate_limit_values(bad, mass, 2)


def test_validate_accepts_oracle_values():
    validate_limit_values(limit_coefficients(3, 3), 3, 3)


def test_c_iso_values():
    assert c_iso(1, 2) == Fraction(1, 3)
    assert c_iso(2, 2) == Fraction(1, 10)
    assert c_iso(1, Fraction(1, 2)) == Fraction(2, 3)


def test_c_overlap_readings_and_oracle():
    alpha = measure(1, 1)
    h = SymmetricKernel(
        2, 2, {(2, 0): Fraction(1), (1, 1): Fraction(-2), (0, 2): Fraction(1)}
    )
    second_moment = statistic_product_mean(h, h, alpha)
    assert second_moment == 2
    # overlapping-window expectations from exact enumeration
    assert c_overlap_oracle(h, h, 0, alpha) == Fraction(1, 5)
    assert c_overlap_oracle(h, h, 1, alpha) == Fraction(1, 2)
    assert c_overlap_oracle(h, h, 2, alpha) == 2
    # the reduced reading reproduces the oracle; the literal one zeroes r >= 1
    for r in (0, 1, 2):
        predicted = c_overlap(2, r, 2, bound="reduced") * second_moment
        assert predicted == c_overlap_oracle(h, h, r, alpha)
    assert c_overlap(2, 0, 2, bound="full") == c_iso(2, 2)
    assert c_overlap(2, 1, 2, bound="full") == 0
    assert c_overlap(2, 2, 2, bound="full") == 0


def test_c_overlap_rejects_bad_reading():
    with pytest.raises(DomainError):
        c_overlap(2, 1, 2, bound="sideways")
