"""Exact combinatorics, special functions and small exact linear algebra.

Everything here is deliberately boring: rational quantities are computed with
``fractions.Fraction`` (so the rest of the package can promise bit-exact
results for rational inputs), and the few genuinely transcendental pieces
(log-Gamma, Beta, the confluent hypergeometric series) are thin, contract-
checked layers over well-tested routines.

Conventions used throughout the package:

* atoms are labelled ``1..K``;
* an *occupation vector* for ``n`` points on ``K`` atoms is a length-``K``
  tuple of non-negative ints summing to ``n`` (how many points sit on each
  atom); symmetric objects are stored as tables keyed by these tuples;
* ``falling_ratio(a, b) = a!/b!`` for integers ``a >= b >= 0``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

from .errors import DomainError, NumericError, SingularSystemError

Scalar = Fraction | float | int

# ---------------------------------------------------------------------------
# scalar parsing / serialisation ("3/2" <-> Fraction(3, 2))


def as_scalar(value) -> Scalar:
    """Coerce a user-supplied number into Fraction (exact) or float.

    Strings and ints become Fractions; floats stay floats so callers can
    tell the exact path from the approximate one.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise DomainError("booleans are not numbers here")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"cannot parse scalar {value!r}") from exc
    raise DomainError(f"unsupported scalar type {type(value).__name__}")


def scalar_to_json(value: Scalar):
    """Serialise a scalar: Fractions as 'p/q' strings, floats as numbers."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, int):
        return value
    return float(value)


def scalar_from_json(value) -> Scalar:
    return as_scalar(value)


# ---------------------------------------------------------------------------
# combinatorics


def binom(a: int, b: int) -> int:
    """Binomial coefficient C(a, b); zero when b > a or b < 0."""
    if a < 0:
        raise DomainError(f"binom requires a >= 0, got a={a}")
    if b < 0 or b > a:
        return 0
    return math.comb(a, b)


def binom_star(a: int, b: int) -> int:
    """C(a, b)·1_{a >= b}: the guarded binomial used by the Psi sums."""
    if a < 0 or b < 0:
        raise DomainError(f"binom_star requires non-negative args, got ({a}, {b})")
    if a < b:
        return 0
    return math.comb(a, b)


def falling_ratio(a: int, b: int) -> int:
    """a!/b! for integers a >= b >= 0 (a falling product of a-b terms)."""
    if b < 0 or a < b:
        raise DomainError(f"falling_ratio requires a >= b >= 0, got ({a}, {b})")
    return math.perm(a, a - b)


def rising_factorial(x: Scalar, k: int) -> Scalar:
    """x(x+1)...(x+k-1); exact when x is a Fraction, 1 when k = 0."""
    if k < 0:
        raise DomainError(f"rising_factorial requires k >= 0, got {k}")
    return _rising_cached(x, k)


@lru_cache(maxsize=1 << 16)
def _rising_cached(x: Scalar, k: int) -> Scalar:
    # halving the range keeps cached sub-products shared between calls with
    # nearby arguments (x, k) and (x, k') instead of redoing long chains
    if k == 0:
        return x - x + 1 if isinstance(x, Fraction) else 1
    if k <= 8:
        out = x - x + 1 if isinstance(x, Fraction) else 1
        for i in range(k):
            out = out * (x + i)
        return out
    half = k // 2
    return _rising_cached(x, half) * _rising_cached(x + half, k - half)


@dataclass(frozen=True)
class IndexSubset:
    """An ordered subset of coordinate indices {1..n}.

    Supports the three set operations the projection formulas need:
    ``&`` (intersection), ``-`` (difference) and ``<=`` (containment).
    """

    indices: tuple[int, ...]

    def __post_init__(self):
        if list(self.indices) != sorted(set(self.indices)):
            raise DomainError(f"indices must be strictly increasing, got {self.indices}")
        if self.indices and self.indices[0] < 1:
            raise DomainError("indices are 1-based")

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __and__(self, other: "IndexSubset") -> "IndexSubset":
        other_set = set(other.indices)
        return IndexSubset(tuple(i for i in self.indices if i in other_set))

    def __sub__(self, other: "IndexSubset") -> "IndexSubset":
        other_set = set(other.indices)
        return IndexSubset(tuple(i for i in self.indices if i not in other_set))

    def __le__(self, other: "IndexSubset") -> bool:
        return set(self.indices) <= set(other.indices)


def k_subsets(n: int, k: int) -> Iterator[IndexSubset]:
    """All C(n, k) subsets of {1..n} in lexicographic order."""
    if n < 0 or k < 0:
        raise DomainError(f"k_subsets requires n, k >= 0, got ({n}, {k})")
    for combo in itertools.combinations(range(1, n + 1), k):
        yield IndexSubset(combo)


def occupation_vectors(order: int, atoms: int) -> Iterator[tuple[int, ...]]:
    """All occupation vectors for `order` points on `atoms` atoms.

    Deterministic order: first coordinate descending, then recursively the
    same on the remainder, so (n,0,...,0) comes first and (0,...,0,n) last.
    """
    if atoms < 1:
        raise DomainError(f"need at least one atom, got {atoms}")
    if order < 0:
        raise DomainError(f"order must be >= 0, got {order}")
    if atoms == 1:
        yield (order,)
        return
    for first in range(order, -1, -1):
        for rest in occupation_vectors(order - first, atoms - 1):
            yield (first,) + rest


def multiplicity(counts: Sequence[int]) -> int:
    """Number of ordered tuples with the given occupation vector: n!/prod m_j!."""
    n = sum(counts)
    out = math.factorial(n)
    for c in counts:
        out //= math.factorial(c)
    return out


def tuple_counts(labels: Sequence[int], atoms: int) -> tuple[int, ...]:
    """Occupation vector of an ordered label tuple (labels are 1-based)."""
    counts = [0] * atoms
    for a in labels:
        if not 1 <= a <= atoms:
            raise DomainError(f"label {a} outside 1..{atoms}")
        counts[a - 1] += 1
    return tuple(counts)


def sub_occupations(counts: Sequence[int], k: int) -> Iterator[tuple[tuple[int, ...], int]]:
    """Sub-vectors mu <= counts with |mu| = k, with the number of index
    subsets realising each: prod_j C(counts_j, mu_j)."""
    counts = tuple(counts)

    def rec(j: int, remaining: int):
        if j == len(counts):
            if remaining == 0:
                yield (), 1
            return
        hi = min(counts[j], remaining)
        for take in range(hi, -1, -1):
            ways_here = math.comb(counts[j], take)
            for rest, ways in rec(j + 1, remaining - take):
                yield (take,) + rest, ways_here * ways

    yield from rec(0, k)


# ---------------------------------------------------------------------------
# special functions


def log_gamma(x: float) -> float:
    """log Gamma(x) for x > 0 (delegates to the platform's C implementation)."""
    if x <= 0:
        raise DomainError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def beta_fn(s: float, t: float) -> float:
    """Euler Beta B(s, t) for s, t > 0, computed in log space."""
    if s <= 0 or t <= 0:
        raise DomainError(f"beta_fn requires positive arguments, got ({s}, {t})")
    return math.exp(math.lgamma(s) + math.lgamma(t) - math.lgamma(s + t))


_HYP_MAX_TERMS = 10_000


def hyp1f1(a: float, b: float, z: float) -> float:
    """Confluent hypergeometric function 1F1(a; b; z) by its power series.

    The series is summed until the absolute term stays below 1e-17 times
    the partial sum for three consecutive terms; b must not be a
    non-positive integer (poles of the series).
    """
    b = float(b)
    if b <= 0 and float(b).is_integer():
        raise DomainError(f"hyp1f1 undefined for non-positive integer b={b}")
    total = 1.0
    term = 1.0
    quiet = 0
    for k in range(_HYP_MAX_TERMS):
        term *= (a + k) / (b + k) * z / (k + 1)
        total += term
        if abs(term) < 1e-17 * abs(total):
            quiet += 1
            if quiet >= 3:
                return total
        else:
            quiet = 0
    raise NumericError(
        f"hyp1f1({a}, {b}, {z}) did not settle within {_HYP_MAX_TERMS} terms",
        partial=total,
    )


# ---------------------------------------------------------------------------
# exact linear algebra (tiny systems over Fraction)


def _rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form in place; returns (matrix, pivot columns)."""
    if not rows:
        return rows, []
    ncols = len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot_row = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        inv = rows[r][c]
        rows[r] = [v / inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                factor = rows[i][c]
                rows[i] = [v - factor * w for v, w in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def solve_exact(matrix: Sequence[Sequence[Scalar]], rhs: Sequence[Scalar]) -> list[Fraction]:
    """Unique exact solution of an (possibly overdetermined) linear system.

    Raises SingularSystemError if the system is inconsistent or the solution
    is not unique. All entries are coerced to Fraction.
    """
    aug = [[Fraction(v) for v in row] + [Fraction(b)] for row, b in zip(matrix, rhs)]
    if not aug:
        raise SingularSystemError("empty system")
    n_unknowns = len(aug[0]) - 1
    reduced, pivots = _rref(aug)
    for row in reduced:
        if all(v == 0 for v in row[:-1]) and row[-1] != 0:
            raise SingularSystemError("inconsistent linear system")
    if len([p for p in pivots if p < n_unknowns]) < n_unknowns:
        raise SingularSystemError("underdetermined linear system")
    solution = [Fraction(0)] * n_unknowns
    for row, p in zip(reduced, pivots):
        if p < n_unknowns:
            solution[p] = row[-1]
    return solution


def nullspace(matrix: Sequence[Sequence[Scalar]]) -> list[list[Fraction]]:
    """Basis of the exact null space of a matrix over the rationals."""
    rows = [[Fraction(v) for v in row] for row in matrix]
    if not rows:
        return []
    ncols = len(rows[0])
    reduced, pivots = _rref(rows)
    free_cols = [c for c in range(ncols) if c not in pivots]
    basis = []
    for free in free_cols:
        vec = [Fraction(0)] * ncols
        vec[free] = Fraction(1)
        for row, p in zip(reduced, pivots):
            vec[p] = -row[free]
        basis.append(vec)
    return basis
