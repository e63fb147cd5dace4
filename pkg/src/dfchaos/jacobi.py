"""Beta-weight orthonormal polynomials on [0, 1] and their kernel form.

For a two-atom support the mass of the first atom,  eta = D({1}),  is a
Beta(a1, a0) variable, and the order-n orthogonal component of any
square-integrable functional of eta is spanned by a single orthonormal
polynomial J_n.  This module evaluates those polynomials from their
closed-form gamma-ratio coefficients, integrates polynomials against the
Beta weight exactly, and converts each J_n into the equivalent symmetric
two-atom kernel phi_n (the solution of a triangular linear system) whose
order-n integral against the random measure reproduces J_n(eta).

Although the printed coefficients are gamma ratios, every ratio collapses
to a product of rising factorials, so for rational parameters the entire
polynomial is  sqrt(k_n) * (exact rational vector)  with k_n itself an
exact rational.  All inner products are therefore evaluated on the
rational side and only the final sqrt introduces a rounding; orthogonality
residuals are exact zeros.  Irrational (float) parameters fall back to a
log-gamma evaluation, which caps the supported degree at n <= 30.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .coeffs import c_iso
from .errors import DomainError, NumericError
from .kernels import SimplexPolynomial, SymmetricKernel
from .measures import DiscreteBaseMeasure, dirichlet_moment
from .numeric import Scalar, as_scalar, binom, rising_factorial

__all__ = [
    "BetaParams",
    "PolynomialCoeffs",
    "exact_parts",
    "jacobi_modified",
    "beta_weight_integral",
    "jacobi_inner",
    "solve_phi_system",
    "jacobi_norm_identity",
    "kernel_to_univariate",
    "as_functional",
]

#: Largest degree supported on the log-gamma fallback path; the exact
#: rational path has no such limit but keeps the same cap for a uniform
#: contract.
MAX_JACOBI_ORDER = 30


@dataclass(frozen=True)
class BetaParams:
    """Parameters (a1, a0) of the Beta weight  x^(a1-1) (1-x)^(a0-1) / B(a1, a0).

    ``a1`` weights the atom whose mass is ``x`` and ``a0`` the complementary
    atom, matching the two-atom base measure ``measure(a1, a0)``.
    """

    a1: Scalar
    a0: Scalar

    def __post_init__(self) -> None:
        object.__setattr__(self, "a1", as_scalar(self.a1))
        object.__setattr__(self, "a0", as_scalar(self.a0))
        if not (self.a1 > 0 and self.a0 > 0):
            raise DomainError(f"Beta parameters must be positive, got ({self.a1}, {self.a0})")

    @property
    def total(self) -> Scalar:
        return self.a1 + self.a0

    @property
    def is_exact(self) -> bool:
        return isinstance(self.a1, (int, Fraction)) and isinstance(self.a0, (int, Fraction))

    def as_measure(self) -> DiscreteBaseMeasure:
        """The two-atom base measure with weights (a1, a0)."""
        return DiscreteBaseMeasure((self.a1, self.a0))


@dataclass(frozen=True)
class PolynomialCoeffs:
    """A univariate polynomial stored as coefficients (c_0, ..., c_n) of x^a.

    The leading coefficient must be nonzero unless the polynomial is a bare
    constant, so ``degree`` is always meaningful.
    """

    coefficients: tuple[Scalar, ...]

    def __post_init__(self) -> None:
        coeffs = tuple(as_scalar(c) for c in self.coefficients)
        if not coeffs:
            raise DomainError("polynomial needs at least one coefficient")
        if len(coeffs) > 1 and coeffs[-1] == 0:
            raise DomainError("leading coefficient must be nonzero (degree overstated)")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def coefficient(self, a: int) -> Scalar:
        if 0 <= a < len(self.coefficients):
            return self.coefficients[a]
        return 0

    def __call__(self, x: Scalar) -> Scalar:
        acc: Scalar = 0
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def mul(self, other: "PolynomialCoeffs") -> "PolynomialCoeffs":
        out = [0] * (self.degree + other.degree + 1)
        for i, ci in enumerate(self.coefficients):
            if ci == 0:
                continue
            for j, cj in enumerate(other.coefficients):
                out[i + j] = out[i + j] + ci * cj
        return _trimmed(out)

    def scale(self, factor: Scalar) -> "PolynomialCoeffs":
        if factor == 0:
            return PolynomialCoeffs((0,))
        return PolynomialCoeffs(tuple(c * factor for c in self.coefficients))

    def sub(self, other: "PolynomialCoeffs") -> "PolynomialCoeffs":
        size = max(len(self.coefficients), len(other.coefficients))
        out = [self.coefficient(a) - other.coefficient(a) for a in range(size)]
        return _trimmed(out)


def _trimmed(coeffs: Sequence[Scalar]) -> PolynomialCoeffs:
    out = list(coeffs)
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return PolynomialCoeffs(tuple(out))


def _validated_order(n: int) -> None:
    if n < 0:
        raise DomainError(f"polynomial degree must be >= 0, got {n}")
    if n > MAX_JACOBI_ORDER:
        raise NumericError(f"degree {n} exceeds the supported range n <= {MAX_JACOBI_ORDER}")


def exact_parts(n: int, params: BetaParams) -> tuple[Fraction, tuple[Fraction, ...]]:
    """Exact factorization J_n = sqrt(k_n) * sum_a g_a x^a for rational params.

    The printed gamma ratios reduce to rising factorials:

        g_a = C(n, a) (-1)^(n-a) rising(q + a, n - a) / rising(p + a + n, n - a)
        k_n = (2n + p) rising(n + p, n) rising(p + 1, 2n - 1)
              / (n! rising(a1, n) rising(a0, n))

    with p = a1 + a0 - 1 and q = a1.  Every base entering a rising factorial
    is strictly positive for n >= 1, so no gamma-pole case arises.  n = 0
    returns (1, (1,)) directly (the generic route would pass through
    Gamma(a1 + a0 - 1), undefined for a1 + a0 <= 1, even though k_0
    collapses to 1 algebraically).
    """
    _validated_order(n)
    if not params.is_exact:
        raise DomainError("exact coefficient parts need rational Beta parameters")
    if n == 0:
        return Fraction(1), (Fraction(1),)
    a1 = Fraction(params.a1)
    a0 = Fraction(params.a0)
    p = a1 + a0 - 1
    q = a1
    g = tuple(
        Fraction(binom(n, a) * (-1) ** (n - a))
        * rising_factorial(q + a, n - a)
        / rising_factorial(p + a + n, n - a)
        for a in range(n + 1)
    )
    k = (
        (2 * n + p)
        * rising_factorial(n + p, n)
        * rising_factorial(p + 1, 2 * n - 1)
        / (math.factorial(n) * rising_factorial(a1, n) * rising_factorial(a0, n))
    )
    return k, g


def _log_gamma_positive(x: float) -> float:
    """lgamma restricted to strictly positive arguments.

    Every gamma argument appearing in the order-n coefficients (n >= 1) is
    strictly positive whenever the Beta parameters are, so a negative or zero
    argument signals a caller bug rather than a numerical regime.
    """
    if x <= 0:
        raise NumericError(f"gamma argument {x} is not positive")
    return math.lgamma(x)


def _float_coefficients(n: int, params: BetaParams) -> tuple[float, ...]:
    """Log-gamma fallback for irrational parameters."""
    a1 = float(params.a1)
    a0 = float(params.a0)
    p = a1 + a0 - 1.0
    q = a1
    log_beta = _log_gamma_positive(a1) + _log_gamma_positive(a0) - _log_gamma_positive(a1 + a0)
    log_kn = (
        math.log(2 * n + p)
        + 2.0 * _log_gamma_positive(2 * n + p)
        + log_beta
        - _log_gamma_positive(n + 1.0)
        - _log_gamma_positive(n + a1)
        - _log_gamma_positive(n + a0)
        - _log_gamma_positive(n + p)
    )
    coeffs = []
    for a in range(n + 1):
        log_g = (
            math.log(binom(n, a))
            + _log_gamma_positive(q + n)
            + _log_gamma_positive(p + a + n)
            - _log_gamma_positive(p + 2 * n)
            - _log_gamma_positive(a + q)
        )
        sign = -1.0 if (n - a) % 2 else 1.0
        coeffs.append(sign * math.exp(0.5 * log_kn + log_g))
    return tuple(coeffs)


def jacobi_modified(n: int, params: BetaParams) -> PolynomialCoeffs:
    """Coefficients of the degree-n orthonormal polynomial for the Beta weight.

    J_n(x) = sqrt(k_n) * sum_a g_{n,a}(p, q) x^a  with p = a1 + a0 - 1 and
    q = a1, where

        g_{n,a}(p, q) = C(n, a) (-1)^(n-a) G(q+n) G(p+a+n) / (G(p+2n) G(a+q))

    and the normalizing constant

        k_n = (2n + a1 + a0 - 1) G(2n + a1 + a0 - 1)^2 * B(a1, a0)
              / (n! G(n+a1) G(n+a0) G(n + a1 + a0 - 1)).

    The result has unit norm against the Beta(a1, a0) weight and a positive
    leading coefficient (g_{n,n} = 1, so the sign is carried entirely by
    sqrt(k_n) > 0).  Rational parameters take the exact rising-factorial
    route of ``exact_parts``; each returned float then carries a single
    rounding from the final sqrt/multiply.
    """
    _validated_order(n)
    if n == 0:
        return PolynomialCoeffs((1.0,))
    if params.is_exact:
        k, g = exact_parts(n, params)
        root = math.sqrt(k.numerator / k.denominator) if k.denominator < 2**52 else math.sqrt(float(k))
        coeffs = tuple(float(ga) * root for ga in g)
    else:
        coeffs = _float_coefficients(n, params)
    if coeffs[-1] < 0:  # unreachable with g_{n,n} = 1, kept as an explicit guarantee
        coeffs = tuple(-c for c in coeffs)
    return PolynomialCoeffs(coeffs)


def _beta_moment(params: BetaParams, a: int) -> Scalar:
    """E[x^a] under the Beta weight: rising(a1, a) / rising(a1 + a0, a)."""
    return rising_factorial(params.a1, a) / rising_factorial(params.total, a)


def beta_weight_integral(poly: PolynomialCoeffs, params: BetaParams) -> Scalar:
    """Integral of a polynomial against the Beta(a1, a0) weight on [0, 1].

    Uses the monomial moments  E[x^a] = rising(a1, a) / rising(a1 + a0, a),
    which are exact for rational parameters and product-stable for floats
    (no gamma evaluations).  Float summation goes through math.fsum.
    """
    terms = [
        c * _beta_moment(params, a)
        for a, c in enumerate(poly.coefficients)
    ]
    if all(isinstance(t, (int, Fraction)) for t in terms):
        return sum(terms, Fraction(0))
    return math.fsum(float(t) for t in terms)


def jacobi_inner(n: int, m: int, params: BetaParams) -> Scalar:
    """Inner product of J_n and J_m against the Beta weight.

    On the exact path the rational bilinear sum  sum_{a,b} g_a g_b E[x^(a+b)]
    is computed first and the irrational factor sqrt(k_n k_m) applied last,
    so the orthogonality zeros are exact rational zeros and the diagonal
    values carry a single float rounding.  Irrational parameters integrate
    the float coefficient product instead.
    """
    if params.is_exact:
        kn, gn = exact_parts(n, params)
        km, gm = exact_parts(m, params)
        bilinear = Fraction(0)
        for a, ga in enumerate(gn):
            for b, gb in enumerate(gm):
                bilinear += ga * gb * _beta_moment(params, a + b)
        if bilinear == 0:
            return Fraction(0)
        if n == m:
            return kn * bilinear
        return math.sqrt(float(kn * km)) * float(bilinear)
    return beta_weight_integral(jacobi_modified(n, params).mul(jacobi_modified(m, params)), params)


def _solve_triangular(n: int, rhs: Sequence[Scalar]) -> list[Scalar]:
    """Forward substitution for the kernel system with right-hand side rhs.

    Row a reads  sum_{m <= a} C(n, m) C(n-m, n-a) (-1)^(a-m) phi_m = rhs_a,
    with pivot C(n, a).
    """
    phi: list[Scalar] = []
    for a in range(n + 1):
        acc = rhs[a]
        for m in range(a):
            sign = -1 if (a - m) % 2 else 1
            acc = acc - sign * binom(n, m) * binom(n - m, n - a) * phi[m]
        phi.append(acc / binom(n, a))
    return phi


def solve_phi_system(n: int, params: BetaParams) -> SymmetricKernel:
    """The symmetric two-atom kernel whose order-n integral equals J_n(eta).

    Writing phi_m for the kernel value on any argument tuple with m entries
    at atom 1 and n - m at atom 2, expanding the order-n integral of phi in
    powers of eta and matching against the coefficients c_{n,a} of J_n gives
    the triangular system

        sum_{m <= a} C(n, m) C(n-m, n-a) (-1)^(a-m) phi_m = c_{n,a},
        a = 0, ..., n,

    solved by forward substitution (the pivot of row a is C(n, a)).  On the
    exact path the system is solved with the rational g-coefficients as the
    right-hand side and the common factor sqrt(k_n) applied afterwards.
    The resulting kernel is degenerate: its order-n integral lies in the
    order-n orthogonal component by construction.
    """
    if n < 0:
        raise DomainError(f"order must be >= 0, got {n}")
    if n == 0:
        return SymmetricKernel(0, 2, {(0, 0): 1.0})
    if params.is_exact:
        k, g = exact_parts(n, params)
        psi = _solve_triangular(n, g)
        root = math.sqrt(k.numerator / k.denominator) if k.denominator < 2**52 else math.sqrt(float(k))
        phi = [float(p) * root for p in psi]
    else:
        c = jacobi_modified(n, params)
        phi = _solve_triangular(n, [c.coefficient(a) for a in range(n + 1)])
    values = {(m, n - m): phi[m] for m in range(n + 1)}
    return SymmetricKernel(n, 2, values)


def kernel_to_univariate(kernel: SymmetricKernel) -> PolynomialCoeffs:
    """Order-n integral of a two-atom kernel as a polynomial in eta = d_1.

    The integral is  sum_m phi_m C(n, m) d_1^m d_2^(n-m);  substituting
    d_2 = 1 - d_1 and expanding binomially yields univariate coefficients.
    """
    if kernel.atoms != 2:
        raise DomainError(f"expected a two-atom kernel, got {kernel.atoms} atoms")
    n = kernel.order
    out: list[Scalar] = [0] * (n + 1)
    for counts, value in kernel.items():
        m = counts[0]
        if value == 0:
            continue
        base = value * binom(n, m)
        for j in range(n - m + 1):
            sign = -1 if j % 2 else 1
            out[m + j] = out[m + j] + base * binom(n - m, j) * sign
    return _trimmed(out)


def as_functional(poly: PolynomialCoeffs) -> SimplexPolynomial:
    """The same polynomial read as a functional of the two-atom measure.

    x^a becomes d_1^a, so the result can be fed to the decomposition engine.
    """
    terms = {
        (a, 0): c for a, c in enumerate(poly.coefficients) if c != 0
    }
    if not terms:
        return SimplexPolynomial.constant(2, 0)
    return SimplexPolynomial(2, terms)


def jacobi_norm_identity(n: int, params: BetaParams) -> tuple[Scalar, Scalar]:
    """Both sides of the norm identity linking J_n to its kernel phi_n.

    Returns (lhs, rhs) where

        lhs = integral of J_n(x)^2 against the Beta weight  (= 1 by
              orthonormality, computed independently from the coefficients),
        rhs = c(n, a1 + a0) * sum_m C(n, m) phi_m^2 *
              E[x^m (1 - x)^(n-m)]  under the Beta weight,

    i.e. the squared norm of the order-n integral of phi_n computed through
    the isometry constant.  On the exact path both sides are rational and
    identical; they are returned unreconciled so callers can compare them at
    their own tolerance.
    """
    if n < 1:
        raise DomainError(f"norm identity needs n >= 1, got {n}")
    lhs = jacobi_inner(n, n, params)

    alpha = params.as_measure()
    if params.is_exact:
        k, g = exact_parts(n, params)
        psi = _solve_triangular(n, g)
        acc = Fraction(0)
        for m, value in enumerate(psi):
            acc += binom(n, m) * value * value * dirichlet_moment(alpha, (m, n - m))
        return lhs, k * acc * c_iso(n, params.total)

    phi = solve_phi_system(n, params)
    acc_f: list[float] = []
    for counts, value in phi.items():
        m = counts[0]
        weight = binom(n, m) * dirichlet_moment(alpha, (m, n - m))
        acc_f.append(float(value) * float(value) * float(weight))
    return lhs, float(c_iso(n, params.total)) * math.fsum(acc_f)
