"""Symmetric kernels and simplex polynomials as exact value tables."""

from __future__ import annotations

from fractions import Fraction

import pytest

from dfchaos.errors import DomainError
from dfchaos.kernels import SimplexPolynomial, SymmetricKernel


def test_kernel_value_lookup_and_orderings():
    h = SymmetricKernel(2, 2, {(2, 0): Fraction(1), (1, 1): Fraction(-2)})
    assert h.value((2, 0)) == 1
    assert h.value((0, 2)) == 0  # missing entries read as zero
    assert h.value_at((1, 2)) == -2
    assert h.value_at((2, 1)) == -2
    with pytest.raises(DomainError):
        h.value_at((1,))  # wrong label count


def test_kernel_from_function_and_algebra():
    h = SymmetricKernel.from_function(1, 2, lambda c: Fraction(c[0]))
    g = h.scale(3).add(h)
    assert g.value((1, 0)) == 4
    assert g.sub(h).value((1, 0)) == 3
    assert h.max_abs() == 1
    assert not h.is_zero()
    assert SymmetricKernel(1, 2, {}).is_zero()


def test_kernel_induced_polynomial_multiplicities():
    h = SymmetricKernel(2, 2, {(1, 1): Fraction(5)})
    poly = h.to_polynomial()
    # the (1,1) occupation vector covers two orderings
    assert poly.terms[(1, 1)] == 10


def test_kernel_json_round_trip():
    h = SymmetricKernel(2, 3, {(1, 1, 0): Fraction(-3, 7), (0, 0, 2): Fraction(2)})
    clone = SymmetricKernel.from_json(h.to_json())
    assert clone.order == 2 and clone.atoms == 3
    for counts in ((1, 1, 0), (0, 0, 2), (2, 0, 0), (0, 1, 1)):
        assert clone.value(counts) == h.value(counts)


def test_polynomial_evaluate_and_degree():
    F = SimplexPolynomial(2, {(2, 0): Fraction(1), (0, 1): Fraction(-1)})
    assert F.degree == 2
    assert F.evaluate((Fraction(1, 2), Fraction(1, 2))) == Fraction(-1, 4)
    G = F.mul(F)
    assert G.degree == 4
    assert G.evaluate((Fraction(1, 2), Fraction(1, 2))) == Fraction(1, 16)


def test_polynomial_algebra_and_padding():
    F = SimplexPolynomial.monomial(2, (1, 0))
    G = SimplexPolynomial.constant(2, Fraction(2))
    H = F.add(G).sub(F).scale(Fraction(1, 2))
    assert H.terms == {(0, 0): Fraction(1)}
    padded = F.pad_to(3)
    assert padded.nvars == 3
    assert padded.evaluate((Fraction(1, 3), Fraction(1, 3), Fraction(1, 3))) == Fraction(1, 3)


def test_polynomial_json_round_trip():
    F = SimplexPolynomial(2, {(1, 1): Fraction(3, 2)})
    clone = SimplexPolynomial.from_json(F.to_json())
    assert clone.terms == F.terms and clone.nvars == 2
