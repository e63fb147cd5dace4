"""Projection coefficients for symmetric statistics of urn sequences.

Three layers live here:

* the finite-sample coefficient engine: the rational functions ``phi`` and
  ``psi`` and the triangular system that yields, for each sample size N, the
  table of projection weights theta_N^(k,a) (and their binomially rescaled
  "starred" form) used by the finite decomposition;
* the infinite-sample limits theta^(k,a) = lim_N C(N,k)·theta*_N(k,a),
  computed two independent ways — polynomial extrapolation in 1/N of the
  exact finite tables, and an exact two-point *projection oracle* that solves
  for the unique weights making the kernel-extraction formula reproduce
  known pure-order functionals;
* the isometry constants c(n, |alpha|) and the overlapping-window covariance
  factors c(r, n, |alpha|), the latter in both circulating closed-form
  readings plus an exact enumeration oracle that arbitrates between them.

All of it is exact over ``fractions.Fraction`` for rational total mass.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

from .errors import (
    CoefficientValidationError,
    ConvergenceError,
    DomainError,
    ResourceCapError,
    SingularSystemError,
)
from .kernels import SimplexPolynomial, SymmetricKernel
from .measures import DiscreteBaseMeasure, dirichlet_moment, with_counts
from .numeric import (
    Scalar,
    binom,
    binom_star,
    falling_ratio,
    occupation_vectors,
    solve_exact,
    sub_occupations,
)
from .polya import DEFAULT_ENUMERATION_CAP, polya_joint_prob

# ---------------------------------------------------------------------------
# the rational building blocks


def phi(n: int, m: int, r: int, p: int, total_mass: Scalar) -> Scalar:
    """The elementary overlap factor.

    phi(n,m,r,p) = (m-r)!/(m-r-p)! · prod_{s=1..m-r-p} (|alpha|+r+p+s-1)
                   / prod_{s=1..m-r} (|alpha|+n+s-1)

    Preconditions: 0 <= r <= m <= n, 0 <= p <= m-r, total mass > 0.
    """
    if not (0 <= r <= m <= n):
        raise DomainError(f"phi requires 0 <= r <= m <= n, got (n={n}, m={m}, r={r})")
    if not (0 <= p <= m - r):
        raise DomainError(f"phi requires 0 <= p <= m-r, got p={p}, m-r={m - r}")
    if not total_mass > 0:
        raise DomainError(f"total mass must be > 0, got {total_mass}")
    value: Scalar = Fraction(falling_ratio(m - r, m - r - p))
    for s in range(1, m - r - p + 1):
        value = value * (total_mass + r + p + s - 1)
    for s in range(1, m - r + 1):
        value = value / (total_mass + n + s - 1)
    return value


def psi(N: int, q: int, n: int, m: int, total_mass: Scalar) -> Scalar:
    """The window-counting sum sum_r C(q,r)·C(N-n, m-r)_*·phi(n,m,r,q-r).

    Preconditions: 1 <= q <= m <= n <= N.
    """
    if not (1 <= q <= m <= n <= N):
        raise DomainError(f"psi requires 1 <= q <= m <= n <= N, got ({q}, {n}, {m}, N={N})")
    total: Scalar = Fraction(0)
    for r in range(q + 1):
        weight = binom(q, r) * binom_star(N - n, m - r)
        if weight:
            total = total + weight * phi(n, m, r, q - r, total_mass)
    return total


# ---------------------------------------------------------------------------
# finite-sample coefficient tables


@dataclass(frozen=True)
class CoefficientTable:
    """Projection weights theta_N^(k,a) for statistics of N urn draws.

    ``entries[(k, a)]`` holds theta_N^(k,a) for 1 <= a <= k <= max_k;
    ``starred[(k, a)]`` holds theta_N^(k,a) / C(N-a, k-a). When
    ``max_k == N`` the table includes the closing row k = N.
    """

    N: int
    total_mass: Scalar
    max_k: int
    entries: Mapping[tuple[int, int], Scalar]
    starred: Mapping[tuple[int, int], Scalar]

    def theta(self, k: int, a: int) -> Scalar:
        try:
            return self.entries[(k, a)]
        except KeyError:
            raise DomainError(
                f"theta({k},{a}) not in table (N={self.N}, max_k={self.max_k})"
            ) from None

    def theta_star(self, k: int, a: int) -> Scalar:
        try:
            return self.starred[(k, a)]
        except KeyError:
            raise DomainError(
                f"theta_star({k},{a}) not in table (N={self.N}, max_k={self.max_k})"
            ) from None


def theta_table(N: int, total_mass: Scalar, max_k: int | None = None) -> CoefficientTable:
    """Build the coefficient table for sample size N.

    For each k < N the diagonal entry is theta^(k,k) = 1/psi(k,k,k) and the
    remaining row entries solve, for q = k-1 down to 1, the single-unknown
    linear condition  sum_{i=q..k} sum_{j=q..i} theta^(i,j)·psi(q,k,j) = 0.
    The closing row is theta^(N,N) = 1, theta^(N,a) = -sum_{s=a..N-1}
    theta^(s,a); it is produced only when max_k >= N (it needs every lower
    row). A vanishing pivot raises SingularSystemError naming (q, k).
    """
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    if not total_mass > 0:
        raise DomainError(f"total mass must be > 0, got {total_mass}")
    if max_k is None:
        max_k = N
    if not 1 <= max_k <= N:
        raise DomainError(f"max_k must lie in 1..N, got {max_k}")

    entries: dict[tuple[int, int], Scalar] = {}
    for k in range(1, min(max_k, N - 1) + 1):
        diag = psi(N, k, k, k, total_mass)
        if diag == 0:
            raise SingularSystemError(f"psi_N(k,k,k) vanished at k={k}, N={N}")
        entries[(k, k)] = 1 / diag
        for q in range(k - 1, 0, -1):
            acc: Scalar = Fraction(0)
            for i in range(q, k + 1):
                for j in range(q, i + 1):
                    if (i, j) == (k, q):
                        continue
                    acc = acc + entries[(i, j)] * psi(N, q, k, j, total_mass)
            pivot = psi(N, q, k, q, total_mass)
            if pivot == 0:
                raise SingularSystemError(f"pivot psi_N({q},{k},{q}) vanished at N={N}")
            entries[(k, q)] = -acc / pivot

    if max_k >= N:
        entries[(N, N)] = Fraction(1)
        for a in range(1, N):
            entries[(N, a)] = -sum(entries[(s, a)] for s in range(a, N))

    starred = {(k, a): value / binom(N - a, k - a) for (k, a), value in entries.items()}
    return CoefficientTable(N, total_mass, max_k, entries, starred)


def system_residuals(table: CoefficientTable) -> dict[tuple[int, int], Scalar]:
    """Re-substitute the table into every defining equation.

    Returns a map (k, q) -> residual: for q = k the normalisation
    theta^(k,k)·psi(k,k,k) - 1, for q < k the homogeneous sum. Every
    residual is exactly zero for a correctly built rational table.
    """
    out: dict[tuple[int, int], Scalar] = {}
    N, mass = table.N, table.total_mass
    for k in range(1, min(table.max_k, N - 1) + 1):
        out[(k, k)] = table.theta(k, k) * psi(N, k, k, k, mass) - 1
        for q in range(1, k):
            acc: Scalar = Fraction(0)
            for i in range(q, k + 1):
                for j in range(q, i + 1):
                    acc = acc + table.theta(i, j) * psi(N, q, k, j, mass)
            out[(k, q)] = acc
    return out


# ---------------------------------------------------------------------------
# limits, route 1: extrapolation of the exact finite tables


@dataclass(frozen=True)
class ThetaLimit:
    """A converged limit estimate with its convergence evidence."""

    k: int
    a: int
    total_mass: Scalar
    value: float
    sample_sizes: tuple[int, ...]
    last_delta: float
    tolerance: float
    oracle_value: Fraction | None = None
    matches_oracle: bool | None = None


def theta_limit(
    k: int,
    a: int,
    total_mass: Scalar,
    tol: float = 1e-8,
    max_N: int = 2**14,
    cross_validate: bool = True,
) -> ThetaLimit:
    """lim_N C(N,k)·theta*_N(k,a) by exact Neville extrapolation in 1/N.

    Sample sizes double (N = k, 2k, 4k, ...); the target is a rational
    function of N, so the interpolating-polynomial diagonal converges
    quickly. The value is reported only once two successive diagonal
    entries agree within ``tol``; otherwise ConvergenceError carries the
    best partial value. With ``cross_validate`` the converged value is
    compared against the exact projection oracle and both are attached.
    """
    if not 1 <= a <= k:
        raise DomainError(f"need 1 <= a <= k, got (k={k}, a={a})")
    xs: list[Fraction] = []
    prev_col: list[Fraction] = []
    sizes: list[int] = []
    previous_diag: Fraction | None = None
    N = k
    while N <= max_N:
        tab = theta_table(N, total_mass, max_k=min(k, N))
        value = Fraction(binom(N, k)) * Fraction(tab.theta_star(k, a))
        x = Fraction(1, N)
        col = [value]
        for i in range(1, len(xs) + 1):
            older_x = xs[len(xs) - i]
            num = x * prev_col[i - 1] - older_x * col[i - 1]
            col.append(num / (x - older_x))
        xs.append(x)
        sizes.append(N)
        prev_col = col
        current = col[-1]
        if previous_diag is not None:
            delta = abs(float(current - previous_diag))
            if delta < tol:
                oracle_val = None
                matches = None
                if cross_validate:
                    oracle_val = limit_coefficient(k, a, total_mass)
                    scale = max(1.0, abs(float(oracle_val)))
                    matches = abs(float(current) - float(oracle_val)) <= 10 * tol * scale
                return ThetaLimit(
                    k, a, total_mass, float(current), tuple(sizes), delta, tol,
                    oracle_val, matches,
                )
        previous_diag = current
        N *= 2
    raise ConvergenceError(
        f"theta limit ({k},{a}) did not stabilise below {tol} with N <= {max_N}",
        partial=float(previous_diag) if previous_diag is not None else None,
    )


def tabulated_limit_values(total_mass: Scalar) -> dict[tuple[int, int], Scalar]:
    """Closed forms for the first limit coefficients as previously tabulated
    elsewhere, retained solely for cross-checking. The second row disagrees
    with both the recursion limit and the projection oracle (see
    ``validation.theta_erratum_report``), so these values must never feed
    the decomposition routines."""
    m = total_mass
    return {
        (1, 1): m + 1,
        (2, 1): (m + 3) * (m + 2),
        (2, 2): (m + 3) * (m + 1) / 2,
    }


# ---------------------------------------------------------------------------
# limits, route 2: the exact two-point projection oracle


def _half_mass(total_mass: Scalar) -> Scalar:
    return Fraction(total_mass) / 2 if isinstance(total_mass, (int, Fraction)) else total_mass / 2


def two_point_measure(total_mass: Scalar) -> DiscreteBaseMeasure:
    """The balanced two-atom measure with the requested total mass."""
    half = _half_mass(total_mass)
    return DiscreteBaseMeasure((half, half))


def degenerate_chain_kernel(total_mass: Scalar, n: int) -> SymmetricKernel:
    """An exact degenerate kernel of order n on the balanced two-point space.

    On atoms {1, 2} with weights (|alpha|/2, |alpha|/2), kernels whose
    one-step predictive average vanishes at every history form a
    one-dimensional space; the representative returned here is pinned by
    value 1 at the all-atom-2 configuration and satisfies the recursion
    v_{j+1} = -v_j·(theta_2 + n-1-j)/(theta_1 + j), where v_j is the value
    at j atom-1 points.
    """
    if n < 1:
        raise DomainError(f"order must be >= 1, got {n}")
    theta1 = theta2 = _half_mass(total_mass)
    v = [Fraction(1) if isinstance(theta1, Fraction) else 1.0]
    for j in range(n):
        v.append(-v[-1] * (theta2 + n - 1 - j) / (theta1 + j))
    return SymmetricKernel(n, 2, {(i, n - i): v[i] for i in range(n + 1)})


def _poly_posterior_mean(
    poly: SimplexPolynomial, alpha: DiscreteBaseMeasure, counts: Sequence[int]
) -> Scalar:
    """E[poly(D) | observed occupation counts], via conjugacy and moments."""
    posterior = with_counts(alpha, counts)
    total: Scalar = Fraction(0)
    for exps, coeff in poly.terms.items():
        total = total + coeff * dirichlet_moment(posterior, exps)
    return total


@lru_cache(maxsize=None)
def _limit_row(total_mass: Scalar, n: int) -> tuple[Fraction, ...]:
    """Solve for (theta^(n,1), ..., theta^(n,n)) on the two-point space.

    The defining conditions: the extraction formula
        T[F](a) = sum_k theta^(n,k) sum_{|mu|=k, mu<=a} ways(mu)·E[F|mu]
    must return the order-n kernel of F for every pure-order test functional
    F_m = integral of the order-m degenerate chain kernel, m = 1..n: zero
    for m < n and the kernel itself for m = n. The resulting overdetermined
    linear system is solved exactly; any inconsistency or rank defect
    raises SingularSystemError (which would mean the conditions do not pin
    the coefficients — by construction they do).
    """
    alpha = two_point_measure(total_mass)
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for m in range(1, n + 1):
        chain = degenerate_chain_kernel(total_mass, m)
        poly = chain.to_polynomial()
        cond_mean: dict[tuple[int, int], Scalar] = {}
        for size in range(1, n + 1):
            for mu in occupation_vectors(size, 2):
                cond_mean[mu] = _poly_posterior_mean(poly, alpha, mu)
        for a_counts in occupation_vectors(n, 2):
            row = []
            for k in range(1, n + 1):
                acc: Scalar = Fraction(0)
                for mu, ways in sub_occupations(a_counts, k):
                    acc = acc + ways * cond_mean[mu]
                row.append(acc)
            rows.append(row)
            rhs.append(chain.value(a_counts) if m == n else Fraction(0))
    solution = solve_exact(rows, rhs)
    return tuple(solution)


def limit_coefficient(n: int, k: int, total_mass: Scalar) -> Fraction:
    """theta^(n,k): the limit projection coefficient, from the exact oracle."""
    if not 1 <= k <= n:
        raise DomainError(f"need 1 <= k <= n, got (n={n}, k={k})")
    mass = Fraction(total_mass) if isinstance(total_mass, int) else total_mass
    return _limit_row(mass, n)[k - 1]


def limit_coefficients(total_mass: Scalar, max_order: int) -> dict[tuple[int, int], Fraction]:
    """All theta^(n,k) for n <= max_order, keyed by (n, k)."""
    out: dict[tuple[int, int], Fraction] = {}
    for n in range(1, max_order + 1):
        for k in range(1, n + 1):
            out[(n, k)] = limit_coefficient(n, k, total_mass)
    return out


def validate_limit_values(
    values: Mapping[tuple[int, int], Scalar],
    total_mass: Scalar,
    max_order: int,
    tol: float = 1e-9,
) -> None:
    """Check supplied limit coefficients against the projection conditions.

    For each order n <= max_order, plugs the supplied theta^(n,·) into the
    oracle's defining linear conditions and raises
    CoefficientValidationError naming the first order whose residual
    exceeds ``tol`` (relative to the kernel scale). Used to refuse
    decompositions driven by unvalidated coefficient sets.
    """
    alpha = two_point_measure(total_mass)
    for n in range(1, max_order + 1):
        row_values = []
        for k in range(1, n + 1):
            if (n, k) not in values:
                raise CoefficientValidationError(
                    f"missing limit coefficient ({n},{k}) in supplied set"
                )
            row_values.append(values[(n, k)])
        worst = 0.0
        for m in range(1, n + 1):
            chain = degenerate_chain_kernel(total_mass, m)
            poly = chain.to_polynomial()
            scale = max(abs(float(v)) for _, v in chain.items())
            for a_counts in occupation_vectors(n, 2):
                acc = 0.0
                for k in range(1, n + 1):
                    inner = 0.0
                    for mu, ways in sub_occupations(a_counts, k):
                        inner += ways * float(_poly_posterior_mean(poly, alpha, mu))
                    acc += float(row_values[k - 1]) * inner
                target = float(chain.value(a_counts)) if m == n else 0.0
                worst = max(worst, abs(acc - target) / scale)
        if worst > tol:
            raise CoefficientValidationError(
                f"supplied theta({n},*) fail the projection conditions "
                f"(worst relative residual {worst:.3e} > {tol:.1e})"
            )


# ---------------------------------------------------------------------------
# isometry and overlap constants


def c_iso(n: int, total_mass: Scalar) -> Scalar:
    """The order-n isometry constant prod_{l=1..n} (n-l+1)/(|alpha|+n+l-1).

    This is the variance scale of an order-n integral: the covariance of two
    same-order integrals of degenerate kernels h, f equals
    c_iso(n)·E[h(X_1..X_n)·f(X_1..X_n)].
    """
    if n < 0:
        raise DomainError(f"order must be >= 0, got {n}")
    if not total_mass > 0:
        raise DomainError(f"total mass must be > 0, got {total_mass}")
    value: Scalar = Fraction(1)
    for l in range(1, n + 1):
        value = value * (n - l + 1) / (total_mass + n + l - 1)
    return value


def c_overlap(n: int, r: int, total_mass: Scalar, bound: str = "reduced") -> Scalar:
    """Covariance factor for two order-n windows sharing r coordinates.

    Two closed-form readings circulate, differing in the product's upper
    bound:

    * ``reduced``: prod_{l=1..n-r} (n-r-l+1)/(|alpha|+n+l-1) — matches the
      exact enumeration oracle (c_overlap_oracle); gives 1 at full overlap
      and c_iso(n) at zero overlap;
    * ``full``: prod_{l=1..n} (n-r-l+1)/(|alpha|+n+l-1) — the numerator hits
      zero as soon as r >= 1, so every partial overlap is assigned zero
      covariance, contradicting the oracle already at r = n.

    Both are kept so reports can show them side by side.
    """
    if not 0 <= r <= n:
        raise DomainError(f"need 0 <= r <= n, got (r={r}, n={n})")
    if bound not in ("reduced", "full"):
        raise DomainError(f"bound must be 'reduced' or 'full', got {bound!r}")
    upper = (n - r) if bound == "reduced" else n
    value: Scalar = Fraction(1)
    for l in range(1, upper + 1):
        value = value * (n - r - l + 1) / (total_mass + n + l - 1)
    return value


def c_overlap_oracle(
    h: SymmetricKernel,
    f: SymmetricKernel,
    r: int,
    alpha: DiscreteBaseMeasure,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> Scalar:
    """E[h(X_1..X_n)·f(X_{n-r+1}..X_{2n-r})], exactly, by enumeration.

    The two order-n windows share their last/first r coordinates. The
    nominal enumeration size K^(2n-r) is checked against ``cap``.
    """
    if h.order != f.order:
        raise DomainError("overlap oracle requires kernels of equal order")
    n = h.order
    if not 0 <= r <= n:
        raise DomainError(f"need 0 <= r <= n, got (r={r}, n={n})")
    if h.atoms != alpha.atoms or f.atoms != alpha.atoms:
        raise DomainError("kernels and measure disagree on the atom count")
    span = 2 * n - r
    if alpha.atoms**span > cap:
        raise ResourceCapError(
            f"enumeration of {alpha.atoms}^{span} tuples exceeds cap {cap}"
        )
    total: Scalar = Fraction(0)
    for labels in itertools.product(range(1, alpha.atoms + 1), repeat=span):
        weight = polya_joint_prob(alpha, labels)
        total = total + weight * h.value_at(labels[:n]) * f.value_at(labels[n - r :])
    return total
