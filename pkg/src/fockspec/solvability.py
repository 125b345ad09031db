"""Classification of normal-ordered elements by invariant subspaces.

An element is *exactly solvable* when it preserves the whole degree
filtration ``span{b^0|0>, ..., b^n|0>}`` for every n; in normal form this is
the termwise condition ``b-exponent <= a-exponent``.  A *quasi-exactly
solvable* element preserves one such span of a fixed degree n.  Invariance
is always decided here by direct leakage testing on the flag matrix; the
closed-form coefficient constraints are provided alongside and checked
against the scan rather than trusted.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from fractions import Fraction
from typing import Optional, Tuple

from .weyl import (
    DEFAULT_DEGREE_CAP,
    FockVector,
    Rational,
    RationalLike,
    WeylElement,
    as_rational,
    falling,
    flag_matrix,
)

#: Default bound for the invariant-degree scan; QES degrees in practice are
#: small, so the scan stays cheap.
DEFAULT_SCAN_BOUND = 32


class NotExactlySolvableError(ValueError):
    """A diagonal eigenvalue was requested for a non-flag-preserving element."""


@dataclass(frozen=True)
class QESCoeffs:
    """Coefficients of ``Q4(b) a^2 + Q3(b) a + Q2(b)`` with

    Q4 = a4 b^4 + a3 b^3 + a2 b^2 + a1 b + a0,
    Q3 = b3 b^3 + b2 b^2 + b1 b + b0,
    Q2 = d2 b^2 + d1 b + d0.
    """

    a4: Rational = Fraction(0)
    a3: Rational = Fraction(0)
    a2: Rational = Fraction(0)
    a1: Rational = Fraction(0)
    a0: Rational = Fraction(0)
    b3: Rational = Fraction(0)
    b2: Rational = Fraction(0)
    b1: Rational = Fraction(0)
    b0: Rational = Fraction(0)
    d2: Rational = Fraction(0)
    d1: Rational = Fraction(0)
    d0: Rational = Fraction(0)

    def __post_init__(self):
        for f in fields(self):
            object.__setattr__(self, f.name, as_rational(getattr(self, f.name)))

    def element(self, cap: int = DEFAULT_DEGREE_CAP) -> WeylElement:
        """The normal-ordered element with these coefficients."""
        terms = {
            (4, 2): self.a4, (3, 2): self.a3, (2, 2): self.a2,
            (1, 2): self.a1, (0, 2): self.a0,
            (3, 1): self.b3, (2, 1): self.b2, (1, 1): self.b1, (0, 1): self.b0,
            (2, 0): self.d2, (1, 0): self.d1, (0, 0): self.d0,
        }
        return WeylElement(terms)


def qes_coeffs_of(u: WeylElement) -> Optional[QESCoeffs]:
    """Read coefficients back off a normal form, or None if it does not fit
    the ``Q4 a^2 + Q3 a + Q2`` shape."""
    names = {
        (4, 2): "a4", (3, 2): "a3", (2, 2): "a2", (1, 2): "a1", (0, 2): "a0",
        (3, 1): "b3", (2, 1): "b2", (1, 1): "b1", (0, 1): "b0",
        (2, 0): "d2", (1, 0): "d1", (0, 0): "d0",
    }
    values = {}
    for key, c in u.terms.items():
        name = names.get(key)
        if name is None:
            return None
        values[name] = c
    return QESCoeffs(**values)


@dataclass(frozen=True)
class SolvabilityReport:
    """Outcome of classifying one element."""

    exactly_solvable: bool
    invariant_degrees: Tuple[int, ...]
    scan_bound: int
    constraint_residuals: Optional[Tuple[Rational, ...]] = None
    leakage_witness: Optional[Tuple[int, FockVector]] = None

    def __post_init__(self):
        if self.exactly_solvable:
            assert self.invariant_degrees == tuple(range(self.scan_bound + 1))


def is_exactly_solvable(u: WeylElement) -> bool:
    """True iff every term has b-exponent <= a-exponent.

    Such elements are exactly the polynomials in the number operator ``b*a``
    and ``a``, and they preserve every degree span.
    """
    return all(i <= j for (i, j) in u.terms)


def es_diagonal(u: WeylElement, k: int) -> Rational:
    """Eigenvalue of an exactly-solvable element on the degree-k sector.

    Only the balanced terms ``(j, j)`` contribute on the diagonal:
    ``sum_j A[j,j] * k(k-1)...(k-j+1)``, which equals the flag-matrix
    diagonal entry.
    """
    if not is_exactly_solvable(u):
        raise NotExactlySolvableError(
            "diagonal eigenvalues require a flag-preserving element"
        )
    return sum(
        (c * falling(k, j) for (i, j), c in u.terms.items() if i == j),
        Fraction(0),
    )


def qes_constraint_residuals(c: QESCoeffs, n: int) -> Tuple[Rational, Rational]:
    """Left sides of the two classical coefficient constraints at degree n.

    The first is the degree-overflow coefficient of column n; the second is
    a *combined* form, the sum of the overflow coefficients of columns n-1
    (quartic top) and n (cubic sub-leading).  See
    :func:`qes_leakage_residuals` for the separated conditions.
    """
    r1 = c.a4 * n * (n - 1) + c.b3 * n + c.d2
    r2 = (
        c.a4 * (n - 1) * (n - 2) + c.b3 * (n - 1) + c.d2
        + c.a3 * n * (n - 1) + c.b2 * n + c.d1
    )
    return (r1, r2)


def heun_constraint_residual(
    a3: RationalLike, b2: RationalLike, d1: RationalLike, n: int
) -> Rational:
    """Residual ``a3 n(n-1) + b2 n + d1`` of the cubic-family constraint."""
    return as_rational(a3) * n * (n - 1) + as_rational(b2) * n + as_rational(d1)


def qes_leakage_residuals(c: QESCoeffs, n: int) -> Tuple[Rational, Rational, Rational]:
    """The exact overflow coefficients that decide invariance of degree n.

    Acting on ``b^k|0>``, the element ``Q4(b) a^2 + Q3(b) a + Q2(b)`` raises
    the degree by at most two, with

        degree k+2 coefficient  C2(k) = a4 k(k-1) + b3 k + d2,
        degree k+1 coefficient  C1(k) = a3 k(k-1) + b2 k + d1.

    The span of degrees 0..n is invariant iff C2(n) = 0, C2(n-1) = 0 (for
    n >= 1) and C1(n) = 0.  Returned in that order; the middle residual is 0
    when n = 0.  Note the classical *pair* of constraints adds C2(n-1) and
    C1(n) into one equation, so it is implied by, but does not imply, these
    three conditions.
    """

    def c2(k: int) -> Rational:
        return c.a4 * k * (k - 1) + c.b3 * k + c.d2

    def c1(k: int) -> Rational:
        return c.a3 * k * (k - 1) + c.b2 * k + c.d1

    return (c2(n), c2(n - 1) if n >= 1 else Fraction(0), c1(n))


def invariant_degree_scan(
    u: WeylElement, n_max: int = DEFAULT_SCAN_BOUND, cap: int = DEFAULT_DEGREE_CAP
) -> Tuple[int, ...]:
    """All n <= n_max whose degree span is invariant, by direct leakage test."""
    if n_max > cap:
        raise ValueError("scan bound exceeds the degree cap")
    found = []
    for n in range(n_max + 1):
        if not flag_matrix(u, n, cap).has_leakage:
            found.append(n)
    return tuple(found)


def first_leakage(
    u: WeylElement, n: int, cap: int = DEFAULT_DEGREE_CAP
) -> Optional[Tuple[int, FockVector]]:
    """Lowest leaking column of the degree-n flag matrix, with its overflow."""
    m = flag_matrix(u, n, cap)
    if not m.has_leakage:
        return None
    col = min(m.leakage)
    return (col, m.leakage[col])


def classify(
    u: WeylElement,
    n_max: int = DEFAULT_SCAN_BOUND,
    target_degree: Optional[int] = None,
    cap: int = DEFAULT_DEGREE_CAP,
) -> SolvabilityReport:
    """Full classification: ES flag, invariant degrees, residuals, witness.

    Constraint residuals are included when the element fits the
    ``Q4 a^2 + Q3 a + Q2`` shape and a degree is available to evaluate them
    at (``target_degree`` if given, else the largest scanned invariant
    degree).  The leakage witness is taken at ``target_degree`` when that
    degree is not invariant, else at the scan bound for elements with no
    invariant degree at all.
    """
    es = is_exactly_solvable(u)
    degrees = invariant_degree_scan(u, n_max, cap)
    residuals: Optional[Tuple[Rational, ...]] = None
    coeffs = qes_coeffs_of(u)
    n_res = target_degree if target_degree is not None else (degrees[-1] if degrees else None)
    if coeffs is not None and n_res is not None:
        if coeffs.a4 == coeffs.b3 == coeffs.d2 == 0:
            residuals = (heun_constraint_residual(coeffs.a3, coeffs.b2, coeffs.d1, n_res),)
        else:
            residuals = qes_constraint_residuals(coeffs, n_res)
    witness = None
    if target_degree is not None and target_degree not in degrees:
        witness = first_leakage(u, target_degree, cap)
    elif not es and not degrees:
        witness = first_leakage(u, n_max, cap)
    return SolvabilityReport(
        exactly_solvable=es,
        invariant_degrees=degrees,
        scan_bound=n_max,
        constraint_residuals=residuals,
        leakage_witness=witness,
    )
