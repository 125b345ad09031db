"""Classification tests.

The invariant-degree scan (direct leakage testing) is the ground truth here;
the closed-form constraint residuals are tested *against* it.  Degree n
invariance of Q4 a^2 + Q3 a + Q2 needs three separate overflow coefficients
to vanish; the classical pair of constraints merges two of them into a sum,
so it is implied by invariance but does not certify it.
"""

import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from fockspec.catalog import hermite, lame, sextic
from fockspec.solvability import (
    NotExactlySolvableError,
    QESCoeffs,
    classify,
    es_diagonal,
    heun_constraint_residual,
    invariant_degree_scan,
    is_exactly_solvable,
    qes_coeffs_of,
    qes_constraint_residuals,
    qes_leakage_residuals,
)
from fockspec.weyl import FockVector, flag_matrix, make

from strategies import rationals, weyl_elements

HERMITE = hermite().element


def solved_coeffs(rng: random.Random, n: int) -> QESCoeffs:
    """Random coefficients solved to satisfy all three overflow conditions."""
    a4 = F(rng.randint(-6, 6), rng.randint(1, 4))
    a3 = F(rng.randint(-6, 6), rng.randint(1, 4))
    free = {
        name: F(rng.randint(-6, 6), rng.randint(1, 4))
        for name in ("a2", "a1", "a0", "b1", "b0", "d0")
    }
    b3 = -2 * a4 * (n - 1)
    d2 = -(a4 * n * (n - 1) + b3 * n)
    b2 = F(rng.randint(-6, 6), rng.randint(1, 4))
    d1 = -(a3 * n * (n - 1) + b2 * n)
    return QESCoeffs(a4=a4, a3=a3, b3=b3, b2=b2, d2=d2, d1=d1, **free)


# -- exactly-solvable test ----------------------------------------------------


def test_hermite_is_exactly_solvable():
    assert is_exactly_solvable(HERMITE)


def test_creation_operator_is_not():
    assert not is_exactly_solvable(make(1, 1, 0))


def test_lame_is_not_exactly_solvable():
    element = lame(2, 1, 3).element
    assert element.coefficient(3, 2) == 4  # b^3 a^2 term with i > j
    assert not is_exactly_solvable(element)


@given(weyl_elements(max_degree=5))
@settings(max_examples=100)
def test_es_criterion_equals_triangular_flag_without_leakage(u):
    fm = flag_matrix(u, 16)
    assert is_exactly_solvable(u) == (fm.is_upper_triangular() and not fm.has_leakage)


# -- diagonal eigenvalues ------------------------------------------------------


def test_es_diagonal_quadratic_example():
    u = make(1, 2, 2) + make(1, 1, 1)  # P2 = b^2, P1 = b
    assert es_diagonal(u, 4) == 4 * 3 + 4


def test_es_diagonal_number_operator():
    for k in range(10):
        assert es_diagonal(make(1, 1, 1), k) == k


def test_es_diagonal_pure_lowering():
    assert es_diagonal(make(1, 0, 2), 7) == 0


def test_es_diagonal_requires_flag_preserving():
    with pytest.raises(NotExactlySolvableError):
        es_diagonal(make(1, 1, 0), 3)


@given(weyl_elements(max_degree=4).filter(is_exactly_solvable), st.integers(0, 12))
def test_es_diagonal_agrees_with_flag_matrix(u, n):
    fm = flag_matrix(u, n)
    for k in range(n + 1):
        assert es_diagonal(u, k) == fm.entries[k][k]


# -- constraint residuals -------------------------------------------------------


def test_lame_residuals_vanish():
    n = 4
    c = QESCoeffs(a3=4, b2=6, d1=-2 * n * (2 * n + 1))
    r1, r2 = qes_constraint_residuals(c, n)
    assert r1 == 0 and r2 == 0
    assert heun_constraint_residual(4, 6, -2 * n * (2 * n + 1), n) == 0


def test_sextic_heun_residual_is_trivially_zero():
    alpha, n = F(3, 2), 5
    assert heun_constraint_residual(0, 4 * alpha, -4 * alpha * n, n) == 0


def test_heun_residual_arithmetic():
    assert heun_constraint_residual(1, 0, -6, 3) == 0
    assert heun_constraint_residual(1, 0, 0, 3) == 6


def test_perturbing_lame_d1_leaks():
    n = 3
    c = QESCoeffs(a3=4, b2=6, d1=-2 * n * (2 * n + 1) + 1)
    assert heun_constraint_residual(c.a3, c.b2, c.d1, n) == 1
    assert n not in invariant_degree_scan(c.element(), 8)
    fm = flag_matrix(c.element(), n)
    assert fm.has_leakage
    column, overflow = min(fm.leakage), fm.leakage[min(fm.leakage)]
    assert column == n and overflow[n + 1] == 1


# -- invariant degree scan -------------------------------------------------------


def test_hermite_preserves_every_degree():
    assert invariant_degree_scan(HERMITE, 12) == tuple(range(13))


def test_lame_scan_finds_exactly_its_degree():
    element = lame(F(5, 3), F(-1, 2), 3).element
    assert invariant_degree_scan(element, 8) == (3,)


def test_creation_operator_has_no_invariant_degree():
    assert invariant_degree_scan(make(1, 1, 0), 8) == ()


def test_scan_bound_respects_cap():
    with pytest.raises(ValueError):
        invariant_degree_scan(HERMITE, 80)


# -- leakage residuals vs scan (the ground-truth equivalence) ---------------------


@given(st.integers(0, 6), st.integers(0, 10**9))
@settings(max_examples=60)
def test_solved_coefficients_scan_to_their_degree(n, seed):
    c = solved_coeffs(random.Random(seed), n)
    assert qes_leakage_residuals(c, n) == (0, 0, 0)
    # the classical printed pair is implied
    assert qes_constraint_residuals(c, n) == (0, 0)
    assert n in invariant_degree_scan(c.element(), max(n + 2, 8))


@given(
    st.integers(0, 6),
    st.builds(
        QESCoeffs,
        a4=rationals(4, 3), a3=rationals(4, 3), a2=rationals(4, 3),
        a1=rationals(4, 3), a0=rationals(4, 3),
        b3=rationals(4, 3), b2=rationals(4, 3), b1=rationals(4, 3),
        b0=rationals(4, 3),
        d2=rationals(4, 3), d1=rationals(4, 3), d0=rationals(4, 3),
    ),
)
@settings(max_examples=100)
def test_leakage_residuals_decide_invariance(n, c):
    invariant = n in invariant_degree_scan(c.element(), max(n + 2, 8))
    assert invariant == (qes_leakage_residuals(c, n) == (0, 0, 0))


def test_combined_residual_pair_does_not_certify_invariance():
    # Solve only the classical pair, leaving the quartic top unbalanced: the
    # two residuals cancel inside the combined equation while column n-1
    # still leaks.  This is why the scan, not the pair, decides invariance.
    n = 4
    a4, a3, b3, b2 = F(1), F(2), F(1), F(3)
    d2 = -(a4 * n * (n - 1) + b3 * n)
    d1 = -(
        a4 * (n - 1) * (n - 2) + b3 * (n - 1) + d2 + a3 * n * (n - 1) + b2 * n
    )
    c = QESCoeffs(a4=a4, a3=a3, b3=b3, b2=b2, d2=d2, d1=d1)
    assert qes_constraint_residuals(c, n) == (0, 0)
    top_n, top_prev, sub_n = qes_leakage_residuals(c, n)
    assert top_n == 0 and top_prev != 0 and sub_n == -top_prev
    assert n not in invariant_degree_scan(c.element(), 8)


def test_combined_residual_is_sum_of_separated_ones():
    c = QESCoeffs(
        a4=F(1, 2), a3=-2, a2=3, b3=F(5, 3), b2=-1, d2=7, d1=F(-4, 5)
    )
    for n in range(7):
        r1, r2 = qes_constraint_residuals(c, n)
        top_n, top_prev, sub_n = qes_leakage_residuals(c, n)
        assert r1 == top_n
        if n >= 1:
            assert r2 == top_prev + sub_n


# -- a0 and d0 shift spectra but never affect invariance ---------------------------


def test_a0_d0_do_not_affect_invariance():
    n = 3
    base = solved_coeffs(random.Random(7), n)
    shifted = QESCoeffs(
        **{
            name: getattr(base, name)
            for name in (
                "a4", "a3", "a2", "a1", "b3", "b2", "b1", "b0", "d2", "d1",
            )
        },
        a0=F(5, 2),
        d0=-3,
    )
    scan_base = invariant_degree_scan(base.element(), 8)
    scan_shifted = invariant_degree_scan(shifted.element(), 8)
    assert scan_base == scan_shifted


def test_d0_shifts_the_whole_diagonal():
    n = 3
    base = solved_coeffs(random.Random(11), n)
    shift = F(9, 4)
    shifted = QESCoeffs(
        **{f: getattr(base, f) for f in base.__dataclass_fields__ if f != "d0"},
        d0=base.d0 + shift,
    )
    fm0 = flag_matrix(base.element(), n)
    fm1 = flag_matrix(shifted.element(), n)
    for k in range(n + 1):
        assert fm1.entries[k][k] - fm0.entries[k][k] == shift


# -- classify -------------------------------------------------------------------


def test_classify_hermite():
    report = classify(HERMITE, n_max=10)
    assert report.exactly_solvable
    assert report.invariant_degrees == tuple(range(11))
    assert report.leakage_witness is None


def test_classify_lame_includes_heun_residual():
    spec = lame(2, 1, 3)
    report = classify(spec.element, n_max=8, target_degree=3)
    assert not report.exactly_solvable
    assert report.invariant_degrees == (3,)
    assert report.constraint_residuals == (F(0),)


def test_classify_leakage_witness_for_creation_operator():
    report = classify(make(1, 1, 0), n_max=6)
    assert report.invariant_degrees == ()
    assert report.leakage_witness is not None
    column, overflow = report.leakage_witness
    assert column == 6 and overflow[7] == 1  # only the top column escapes
    targeted = classify(make(1, 1, 0), n_max=6, target_degree=2)
    assert targeted.leakage_witness == (2, FockVector.basis(3))


def test_qes_coeffs_roundtrip_through_element():
    c = QESCoeffs(a4=1, a3=-2, a2=F(1, 3), b3=4, b1=-1, d2=5, d0=F(7, 2))
    assert qes_coeffs_of(c.element()) == c
    assert qes_coeffs_of(make(1, 3, 3)) is None


def test_sextic_matches_its_qes_coefficients():
    alpha, beta, n = F(1), F(2, 3), 4
    spec = sextic(alpha, beta, n)
    c = qes_coeffs_of(spec.element)
    assert c is not None
    assert (c.a1, c.b2, c.b1, c.b0, c.d1) == (
        F(-4), 4 * alpha, 4 * beta, F(-2), -4 * alpha * n
    )
    assert heun_constraint_residual(c.a3, c.b2, c.d1, n) == 0
