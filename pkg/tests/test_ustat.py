"""Windowed U-statistics, the projection oracle, and the scaled candidate."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from dfchaos.chaos import chaos_kernels, multiple_integral
from dfchaos.errors import DomainError
from dfchaos.hoeffding import degenerate_basis
from dfchaos.kernels import SimplexPolynomial, SymmetricKernel
from dfchaos.measures import measure
from dfchaos.ustat import (
    UStatistic,
    approximation_report,
    best_symmetric_approx_oracle,
    candidate_error_formula,
    direct_loss,
    eval_ustat,
    eval_ustat_counts,
    mc_loss,
    scaled_kernel_candidate,
    statistic_from_kernels,
    ustat_mse_curve,
)

UNIFORM = measure(1, 1)
SQUARED_MASS = SimplexPolynomial.monomial(2, (2, 0))


def test_eval_ustat_counts_hand_value():
    h = SymmetricKernel(
        2, 2, {(2, 0): Fraction(1), (1, 1): Fraction(-2), (0, 2): Fraction(1)}
    )
    # window (2,1): subsets {11}:ways 1 -> h(2,0); {12}:ways 2 -> h(1,1)
    assert eval_ustat_counts(h, 3, (2, 1)) == Fraction(1 * 1 + 2 * (-2), 3)
    with pytest.raises(DomainError):
        eval_ustat_counts(h, 3, (1, 1))


def test_eval_ustat_uses_window_prefix():
    h = SymmetricKernel(1, 2, {(1, 0): Fraction(1), (0, 1): Fraction(0)})
    u = UStatistic(h, 2)
    assert eval_ustat(u, (1, 2, 1, 1)) == Fraction(1, 2)
    with pytest.raises(DomainError):
        eval_ustat(u, (1,))


def test_statistic_from_kernels_is_subset_sum():
    h1 = SymmetricKernel(1, 2, {(1, 0): Fraction(1), (0, 1): Fraction(-1)})
    S = statistic_from_kernels({1: h1}, 2, 2)
    assert S.value((2, 0)) == 2
    assert S.value((1, 1)) == 0
    assert S.value((0, 2)) == -2


def test_frozen_losses_window_one_and_two():
    for window, oracle_loss, candidate_loss in (
        (1, Fraction(11, 180), Fraction(31, 180)),
        (2, Fraction(7, 150), Fraction(2, 15)),
    ):
        oracle = best_symmetric_approx_oracle(SQUARED_MASS, UNIFORM, window)
        assert oracle.loss == oracle_loss
        assert direct_loss(oracle.kernels(), SQUARED_MASS, UNIFORM, window) == oracle_loss
        candidate = scaled_kernel_candidate(SQUARED_MASS, UNIFORM, window)
        assert (
            direct_loss(candidate.kernels, SQUARED_MASS, UNIFORM, window)
            == candidate_loss
        )


def test_candidate_error_formula_frozen_values():
    decomposition = chaos_kernels(SQUARED_MASS, UNIFORM, 2)
    from dfchaos.chaos import statistic_product_mean

    seconds = {
        n: statistic_product_mean(
            decomposition.kernel(n), decomposition.kernel(n), UNIFORM
        )
        for n in (1, 2)
    }
    assert candidate_error_formula(seconds, 2, 1, "reduced") == Fraction(-29, 180)
    assert candidate_error_formula(seconds, 2, 1, "full") == Fraction(4, 45)
    assert candidate_error_formula(seconds, 2, 2, "reduced") == Fraction(-2, 15)
    assert candidate_error_formula(seconds, 2, 2, "full") == Fraction(17, 360)


def test_mc_loss_confirms_enumeration():
    rng = np.random.default_rng(424242)
    oracle = best_symmetric_approx_oracle(SQUARED_MASS, UNIFORM, 2)
    estimate = mc_loss(oracle.kernels(), SQUARED_MASS, UNIFORM, 2, 20_000, rng)
    assert estimate.value == pytest.approx(float(oracle.loss), abs=4 * estimate.stderr)


def test_report_optimality_and_discrepancy_records():
    rng = np.random.default_rng(7)
    report = approximation_report(SQUARED_MASS, UNIFORM, 2, reps=4000, rng=rng)
    assert report.oracle_loss_enumerated <= report.candidate_loss_enumerated
    assert report.oracle_loss_enumerated == Fraction(7, 150)
    # neither closed form reproduces the enumerated candidate loss; both
    # mismatches must be recorded rather than silently dropped
    assert len(report.discrepancies) == 2
    payload = report.to_json()
    assert payload["discrepancies"]
    assert payload["oracle"]["loss_enumerated"] == "7/150"


def test_mse_curve_halves_with_window_doubling():
    rng = np.random.default_rng(20260825)
    h = degenerate_basis(UNIFORM, 2)[0]
    curve = ustat_mse_curve(h, UNIFORM, [100, 200], 4000, rng)
    ratio = curve[0][1] / curve[1][1]
    assert 1.4 <= ratio <= 3.0


def test_ustat_converges_to_multiple_integral():
    # along one growing sample, U_N(h) approaches the integral of h against
    # the limiting measure of that same trajectory
    rng = np.random.default_rng(5)
    h = degenerate_basis(UNIFORM, 2)[0]
    d = rng.dirichlet([1.0, 1.0])
    limit = float(
        multiple_integral(
            h, (Fraction(d[0]).limit_denominator(10**9), Fraction(d[1]).limit_denominator(10**9))
        )
    )
    counts = rng.multinomial(3000, d)
    value = float(eval_ustat_counts(h, 3000, tuple(int(c) for c in counts)))
    assert value == pytest.approx(limit, abs=0.15)
