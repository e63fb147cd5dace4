"""Spectral expansion of a neutral multi-allele diffusion's transition density.

The stationary law is the Dirichlet distribution on the simplex attached to
positive mutation weights theta = (theta_1 .. theta_K).  Its orthonormal
polynomials P_n (multi-indexed over the K-1 free coordinates, built by exact
Gram-Schmidt on monomials in graded lexicographic order) assemble into
degree-n kernel polynomials

    Q_n(gamma, gamma') = sum over |n| = n of  P_n(gamma) * P_n(gamma'),

and the transition density after time t is the eigen-decayed series

    f_theta(gamma) * (1 + sum_{n >= 1} rho_n(t) Q_n(gamma, gamma')),

with rho_n(t) = exp(-n(n-1)t/2 - |theta| n t / 2).  Everything up to the
final density evaluation is exact rational arithmetic: Gram-Schmidt runs on
Dirichlet moments, Q_n is evaluated from the unnormalized orthogonal basis
(one division by the exact squared norms), and each Q_n integrates to an
exact zero against the stationary law.

Points on the simplex are passed as their K-1 free coordinates; the last
coordinate is implied.  ``q_via_multiple_integrals`` re-derives Q_n through
the decomposition engine — each basis polynomial of exact degree n equals a
single order-n integral of a degenerate kernel, and evaluating that integral
against the deterministic measure sitting at a simplex point recovers the
polynomial — providing an independent route to the same kernel values.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .chaos import chaos_kernels, multiple_integral
from .errors import DomainError
from .kernels import SimplexPolynomial
from .measures import DiscreteBaseMeasure, dirichlet_moment
from .numeric import Scalar, as_scalar

__all__ = [
    "multi_indices",
    "monomial_expectation",
    "simplex_expectation",
    "dirichlet_density",
    "gram_schmidt_P",
    "TransitionModel",
    "TransitionDensity",
    "kernel_Q",
    "q_polynomial",
    "rho",
    "transition_density",
    "q_via_multiple_integrals",
]


def multi_indices(dim: int, max_degree: int) -> list[tuple[int, ...]]:
    """All exponent vectors of length ``dim`` with total degree <= max_degree.

    Ordered graded-lexicographically: primarily by total degree, ties broken
    by the tuple itself.  Grading is what makes the Gram-Schmidt output have
    degree(P_n) = |n|; the lexicographic tie-break is just a deterministic
    choice.
    """
    if dim < 1:
        raise DomainError(f"need at least one free coordinate, got {dim}")
    if max_degree < 0:
        raise DomainError(f"max_degree must be >= 0, got {max_degree}")

    def bounded(remaining_dim: int, total: int) -> list[tuple[int, ...]]:
        if remaining_dim == 0:
            return [()] if total == 0 else []
        out = []
        for first in range(total + 1):
            for rest in bounded(remaining_dim - 1, total - first):
                out.append((first,) + rest)
        return out

    indices: list[tuple[int, ...]] = []
    for degree in range(max_degree + 1):
        indices.extend(sorted(bounded(dim, degree)))
    return indices


def _validated_theta(theta: DiscreteBaseMeasure | Sequence[Scalar]) -> DiscreteBaseMeasure:
    if isinstance(theta, DiscreteBaseMeasure):
        measure = theta
    else:
        measure = DiscreteBaseMeasure(tuple(theta))
    if measure.atoms < 2:
        raise DomainError(f"need at least two mutation weights, got {measure.atoms}")
    return measure


def _validated_point(gamma: Sequence[Scalar], dim: int) -> tuple[Scalar, ...]:
    point = tuple(as_scalar(g) for g in gamma)
    if len(point) != dim:
        raise DomainError(f"expected {dim} free coordinates, got {len(point)}")
    if any(g <= 0 for g in point) or sum(point) >= 1:
        raise DomainError(f"point {point} is not strictly interior to the simplex")
    return point


def _full_point(gamma: tuple[Scalar, ...]) -> tuple[Scalar, ...]:
    return gamma + (1 - sum(gamma),)


def monomial_expectation(theta: DiscreteBaseMeasure, exponents: Sequence[int]) -> Scalar:
    """Stationary moment E[gamma_1^m1 ... gamma_{K-1}^m_{K-1}].

    The free coordinates are the first K-1 masses of a Dirichlet(theta)
    vector, so this is the joint Dirichlet moment with exponent 0 on the
    last atom.
    """
    return dirichlet_moment(theta, tuple(exponents) + (0,))


def simplex_expectation(theta: DiscreteBaseMeasure, poly: SimplexPolynomial) -> Scalar:
    """Exact stationary expectation of a polynomial in the free coordinates."""
    if poly.nvars != theta.atoms - 1:
        raise DomainError(
            f"polynomial has {poly.nvars} variables, expected {theta.atoms - 1}"
        )
    total: Scalar = 0
    for exponents, coeff in poly.terms.items():
        total = total + coeff * monomial_expectation(theta, exponents)
    return total


def dirichlet_density(theta: DiscreteBaseMeasure | Sequence[Scalar], gamma: Sequence[Scalar]) -> float:
    """Stationary density at an interior simplex point (K-1 free coordinates).

    f(gamma) = Gamma(|theta|) / prod_j Gamma(theta_j) *
               gamma_1^(theta_1 - 1) ... gamma_{K-1}^(theta_{K-1} - 1) *
               (1 - gamma_1 - ... - gamma_{K-1})^(theta_K - 1).

    The final exponent belongs to the K-th weight: the density must assign
    the implied coordinate its own parameter, as the K = 2 case
    f(x) = x^(theta_1 - 1) (1-x)^(theta_2 - 1) / B(theta_1, theta_2) shows.
    Boundary points are rejected rather than extrapolated.
    """
    measure = _validated_theta(theta)
    point = _validated_point(gamma, measure.atoms - 1)
    weights = [float(w) for w in measure.weights]
    log_norm = math.lgamma(float(measure.total_mass)) - sum(math.lgamma(w) for w in weights)
    full = [float(g) for g in _full_point(point)]
    log_density = log_norm + sum((w - 1.0) * math.log(g) for w, g in zip(weights, full))
    return math.exp(log_density)


def _exact_weights_key(theta: DiscreteBaseMeasure) -> tuple[Fraction, ...]:
    weights = []
    for w in theta.weights:
        if isinstance(w, float):
            weights.append(Fraction(w).limit_denominator(10**12))
        else:
            weights.append(Fraction(w))
    return tuple(weights)


@lru_cache(maxsize=None)
def _orthogonal_basis(
    weights: tuple[Fraction, ...], max_degree: int
) -> tuple[tuple[tuple[int, ...], ...], tuple[SimplexPolynomial, ...], tuple[Fraction, ...]]:
    """Exact unnormalized Gram-Schmidt basis over the monomials.

    Returns (indices, orthogonal polynomials e_n, squared norms).  Each e_n
    is monic in its leading monomial, has exact rational coefficients, and
    is orthogonal to every earlier basis element under the stationary law.
    """
    theta = DiscreteBaseMeasure(weights)
    dim = len(weights) - 1
    indices = tuple(multi_indices(dim, max_degree))
    basis: list[SimplexPolynomial] = []
    norms: list[Fraction] = []
    for index in indices:
        candidate = SimplexPolynomial.monomial(dim, index)
        for prior, norm_sq in zip(basis, norms):
            cross = simplex_expectation(theta, candidate.mul(prior))
            if cross != 0:
                candidate = candidate.sub(prior.scale(Fraction(cross) / norm_sq))
        norm_sq = Fraction(simplex_expectation(theta, candidate.mul(candidate)))
        if norm_sq <= 0:
            raise DomainError("orthogonalization produced a null polynomial")
        basis.append(candidate)
        norms.append(norm_sq)
    return indices, tuple(basis), tuple(norms)


def _float_basis(
    theta: DiscreteBaseMeasure, max_degree: int
) -> tuple[tuple[tuple[int, ...], ...], tuple[SimplexPolynomial, ...], tuple[float, ...]]:
    """Float-weight fallback: modified Gram-Schmidt with a conditioning check."""
    dim = theta.atoms - 1
    indices = tuple(multi_indices(dim, max_degree))
    basis: list[SimplexPolynomial] = []
    norms: list[float] = []
    for index in indices:
        candidate = SimplexPolynomial.monomial(dim, index)
        for prior, norm_sq in zip(basis, norms):
            cross = float(simplex_expectation(theta, candidate.mul(prior)))
            if cross != 0.0:
                candidate = candidate.sub(prior.scale(cross / norm_sq))
        norm_sq = float(simplex_expectation(theta, candidate.mul(candidate)))
        lead = abs(float(candidate.terms.get(index, 0.0)))
        if norm_sq <= 0 or lead < 1e-8:
            warnings.warn(
                f"Gram matrix nearly singular at index {index}; "
                "orthonormality of the returned basis is degraded",
                stacklevel=3,
            )
            norm_sq = max(norm_sq, 1e-300)
        basis.append(candidate)
        norms.append(norm_sq)
    return indices, tuple(basis), tuple(norms)


def _basis_for(theta: DiscreteBaseMeasure, max_degree: int):
    if all(not isinstance(w, float) for w in theta.weights):
        return _orthogonal_basis(_exact_weights_key(theta), max_degree)
    return _float_basis(theta, max_degree)


def gram_schmidt_P(
    theta: DiscreteBaseMeasure | Sequence[Scalar], max_degree: int
) -> list[SimplexPolynomial]:
    """Orthonormal polynomial basis up to ``max_degree``, graded lex order.

    P_0 = 1; the element attached to multi-index n has exact degree |n|;
    the whole family is orthonormal under the stationary Dirichlet law.
    Coefficients are floats (the normalization is an irrational square
    root); the underlying exact orthogonal system is used internally for
    every quantity that can stay rational.
    """
    measure = _validated_theta(theta)
    _, basis, norms = _basis_for(measure, max_degree)
    out = []
    for poly, norm_sq in zip(basis, norms):
        root = math.sqrt(float(norm_sq))
        out.append(poly.scale(1.0 / root))
    return out


def rho(n: int, t: Scalar, total: Scalar) -> float:
    """Eigenvalue decay factor exp(-n(n-1)t/2 - total*n*t/2) of the order-n band."""
    if n < 1:
        raise DomainError(f"decay factor defined for n >= 1, got {n}")
    t_f = float(t)
    if t_f < 0:
        raise DomainError(f"time must be >= 0, got {t}")
    return math.exp(-0.5 * n * (n - 1) * t_f - 0.5 * float(total) * n * t_f)


@dataclass(frozen=True)
class TransitionModel:
    """Mutation weights plus the cached orthogonal system up to order M + 1.

    The extra order feeds the truncation tail bound.  Construction is the
    only expensive step; the instance is immutable afterwards and all
    evaluations are pure.
    """

    theta: DiscreteBaseMeasure
    M: int

    def __post_init__(self) -> None:
        measure = _validated_theta(self.theta)
        object.__setattr__(self, "theta", measure)
        if self.M < 0:
            raise DomainError(f"truncation order must be >= 0, got {self.M}")
        indices, basis, norms = _basis_for(measure, self.M + 1)
        by_degree: dict[int, list[tuple[SimplexPolynomial, Scalar]]] = {}
        for index, poly, norm_sq in zip(indices, basis, norms):
            by_degree.setdefault(sum(index), []).append((poly, norm_sq))
        object.__setattr__(self, "_bands", by_degree)

    @property
    def dim(self) -> int:
        return self.theta.atoms - 1

    def band(self, n: int) -> list[tuple[SimplexPolynomial, Scalar]]:
        """Unnormalized orthogonal polynomials of exact degree n with norms^2."""
        if n < 0 or n > self.M + 1:
            raise DomainError(f"band {n} outside cached range 0..{self.M + 1}")
        return list(self._bands[n])

    def _kernel_q(self, n: int, gamma: Sequence[Scalar], gamma_prime: Sequence[Scalar]) -> Scalar:
        g = _validated_point(gamma, self.dim)
        gp = _validated_point(gamma_prime, self.dim)
        total: Scalar = 0
        for poly, norm_sq in self._bands[n]:
            total = total + poly.evaluate(g) * poly.evaluate(gp) / norm_sq
        return total

    def _q_polynomial(self, n: int, gamma: Sequence[Scalar]) -> SimplexPolynomial:
        g = _validated_point(gamma, self.dim)
        out = SimplexPolynomial.constant(self.dim, 0)
        for poly, norm_sq in self._bands[n]:
            out = out.add(poly.scale(poly.evaluate(g) / norm_sq))
        return out


def kernel_Q(
    model: TransitionModel, n: int, gamma: Sequence[Scalar], gamma_prime: Sequence[Scalar]
) -> Scalar:
    """Degree-n kernel polynomial sum_{|n| = n} P_n(gamma) P_n(gamma').

    Evaluated from the exact orthogonal system as  sum e(gamma) e(gamma') /
    norm^2,  so rational inputs give exact rational outputs.  Symmetric in
    its two arguments; Q_0 = 1.
    """
    if n < 0 or n > model.M:
        raise DomainError(f"kernel order {n} outside model truncation 0..{model.M}")
    return model._kernel_q(n, gamma, gamma_prime)


def q_polynomial(model: TransitionModel, n: int, gamma: Sequence[Scalar]) -> SimplexPolynomial:
    """Q_n with the second argument fixed: a polynomial in the free coordinates.

    Integrating it against the stationary law gives exactly 0 for n >= 1
    (orthogonality of each basis element to constants), which is what makes
    the truncated transition density integrate to 1.
    """
    if n < 0 or n > model.M:
        raise DomainError(f"kernel order {n} outside model truncation 0..{model.M}")
    return model._q_polynomial(n, gamma)


@dataclass(frozen=True)
class TransitionDensity:
    """Truncated transition density value with its error diagnostics.

    ``value`` = stationary * (1 + sum of contributions); ``contributions``
    holds (n, rho_n, Q_n, term) per order; ``tail_bound`` bounds the
    absolute truncation error through the next band's diagonal kernel
    values; ``negative`` flags a truncation artifact (the exact density is
    nonnegative, truncated series need not be — values are reported as-is).
    """

    value: float
    stationary: float
    contributions: tuple[tuple[int, float, float, float], ...]
    tail_bound: float
    negative: bool


def transition_density(
    model: TransitionModel, t: Scalar, gamma: Sequence[Scalar], gamma_prime: Sequence[Scalar]
) -> TransitionDensity:
    """Truncated spectral transition density between two interior points.

    value = f(gamma) * (1 + sum_{n=1..M} rho_n(t) Q_n(gamma, gamma')),
    tail bound = f(gamma) * rho_{M+1}(t) * sqrt(Q_{M+1}(gamma, gamma) *
    Q_{M+1}(gamma', gamma')) — the first neglected term bounded by
    Cauchy-Schwarz on the reproducing kernel, with rho decreasing in n.
    """
    t_f = float(t)
    if t_f <= 0:
        raise DomainError(f"time must be > 0, got {t}")
    g = _validated_point(gamma, model.dim)
    gp = _validated_point(gamma_prime, model.dim)
    stationary = dirichlet_density(model.theta, g)
    total_mass = model.theta.total_mass

    contributions = []
    bracket_terms = []
    for n in range(1, model.M + 1):
        decay = rho(n, t_f, total_mass)
        q_val = float(model._kernel_q(n, g, gp))
        term = decay * q_val
        contributions.append((n, decay, q_val, term))
        bracket_terms.append(term)
    bracket = 1.0 + math.fsum(bracket_terms)
    value = stationary * bracket

    next_band = model.M + 1
    decay_next = rho(next_band, t_f, total_mass)
    diag = float(model._kernel_q(next_band, g, g)) * float(model._kernel_q(next_band, gp, gp))
    tail = stationary * decay_next * math.sqrt(max(diag, 0.0))

    return TransitionDensity(
        value=value,
        stationary=stationary,
        contributions=tuple(contributions),
        tail_bound=tail,
        negative=value < 0.0,
    )


def q_via_multiple_integrals(
    model: TransitionModel, n: int, gamma: Sequence[Scalar], gamma_prime: Sequence[Scalar]
) -> Scalar:
    """Q_n recomputed through the decomposition engine.

    Each unnormalized basis polynomial e of exact degree n, viewed as a
    functional of the random measure, has zero mean and a single order-n
    component: e(D) = integral of a degenerate kernel h against D^(x)n.
    That polynomial identity can be evaluated at the deterministic measure
    concentrated on a simplex point, so

        Q_n(g, g') = sum_e [int h dmu_g] [int h dmu_g'] / norm^2(e).

    Agreement with ``kernel_Q`` checks the decomposition engine against the
    direct Gram-Schmidt route.
    """
    if n < 0 or n > model.M:
        raise DomainError(f"kernel order {n} outside model truncation 0..{model.M}")
    g = _full_point(_validated_point(gamma, model.dim))
    gp = _full_point(_validated_point(gamma_prime, model.dim))
    if n == 0:
        return 1
    total: Scalar = 0
    for poly, norm_sq in model.band(n):
        functional = poly.pad_to(model.theta.atoms)
        decomposition = chaos_kernels(functional, model.theta, n)
        h = decomposition.kernel(n)
        left = multiple_integral(h, g)
        right = multiple_integral(h, gp)
        total = total + left * right / norm_sq
    return total
