from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from dimerstrip.qcombi import (DoubleColumnDiagram, InexactDivisionError, QSeries, binomial_count,
                               catalan_decomposition, character_closed_form,
                               character_limit_truncation, character_refinement, conformal_weight,
                               diagrams, diagrams_with_content, finitized_irreducible,
                               irreducible_limit_truncation, narayana_decomposition,
                               partition_series, q, q_binomial, q_catalan, q_narayana,
                               q_narayana_diagrams, q_pochhammer, refinement_truncation,
                               selection_matrix, skew_q_binomial)
from dimerstrip.statespace import DomainError


def poly(*coeffs):
    return QSeries(enumerate(coeffs))


exponents = st.fractions(min_value=-3, max_value=3, max_denominator=24).filter(
    lambda f: 24 % f.denominator == 0)
series = st.lists(st.tuples(exponents, st.integers(-4, 4)), max_size=5).map(QSeries)


@settings(max_examples=60, deadline=None)
@given(series, series, series)
def test_ring_laws(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * QSeries.one() == a
    assert a - a == QSeries.zero()


@settings(max_examples=60, deadline=None)
@given(series, series.filter(lambda s: not s.is_zero()))
def test_exact_division_inverts_product(a, b):
    assert (a * b).exact_div(b) == a


@settings(max_examples=60, deadline=None)
@given(series)
def test_text_roundtrip(a):
    assert QSeries.from_text(a.to_text()) == a


def test_invariants_and_text_form():
    s = QSeries({Fraction(1, 12): 2, 0: 0, Fraction(-1, 24): 1})
    assert s.terms == {Fraction(-1, 24): 1, Fraction(1, 12): 2}
    assert s.to_text() == "1*q^(-1/24)+2*q^(1/12)"
    assert QSeries.zero().to_text() == "0"
    with pytest.raises(DomainError):
        QSeries({Fraction(1, 5): 1})
    with pytest.raises(InexactDivisionError):
        poly(1, 0, 1).exact_div(poly(1, 1))


def test_q_binomial_examples():
    assert q_binomial(2, 1) == poly(1, 1)
    assert q_binomial(4, 2) == poly(1, 1, 2, 1, 1)
    assert q_binomial(3, 5) == QSeries.zero()
    for big_m in range(9):
        for m in range(big_m + 1):
            assert q_binomial(big_m, m).at_one() == comb(big_m, m)


def test_pochhammer_and_partitions():
    assert q_pochhammer(2) == (1 - q) * (1 - q**2)
    assert partition_series(6) == poly(1, 1, 2, 3, 5, 7, 11)


def test_skew_binomial_worked_example():
    expect = poly(1, 2, 2, 2, 1)
    for method in ("closed_form", "diagrams", "young"):
        assert skew_q_binomial(3, 1, 2, method) == expect
    assert q_narayana(3, 1, 2) == expect.shift(4)
    with pytest.raises(DomainError):
        skew_q_binomial(3, 2, 1)


@pytest.mark.parametrize("big_m", range(7))
def test_skew_binomial_three_methods(big_m):
    for m in range(big_m + 1):
        for n in range(m, big_m + 1):
            forms = {skew_q_binomial(big_m, m, n, k) for k in ("closed_form", "diagrams", "young")}
            assert len(forms) == 1
            assert q_narayana(big_m, m, n) == q_narayana_diagrams(big_m, m, n)
    assert skew_q_binomial(big_m, 0, 0) == QSeries.one()


def test_diagram_admissibility():
    assert DoubleColumnDiagram(3, {2}, {1, 3}).admissible()
    assert not DoubleColumnDiagram(3, {3}, {1, 2}).admissible()
    assert not DoubleColumnDiagram(3, {1, 2}, {3}).admissible()
    dia = DoubleColumnDiagram(3, {1}, {1, 2})
    assert dia.energy == 4 and dia.content == (2, 1, 0)
    assert all(d.content == (2, 1, 0) for d in diagrams_with_content((2, 1, 0)))
    assert sum(1 for _ in diagrams(3, 1, 2)) == skew_q_binomial(3, 1, 2).at_one()
    with pytest.raises(DomainError):
        DoubleColumnDiagram(2, {3}, set())


@pytest.mark.parametrize("big_m", range(9))
def test_catalan_closed_forms(big_m):
    for r in range(1, big_m + 2):
        for kind in ("odd", "even"):
            q_catalan(big_m, r, kind)  # raises if closed form and sum differ
            ch = finitized_irreducible(big_m, r, kind)
            assert ch.at_one() > 0
            assert ch.shift(-Fraction(1, 12)).shift(Fraction(1, 8) if kind == "even" else 0).nonnegative()


def test_catalan_examples():
    assert q_catalan(2, 1) == sum((q_narayana(2, m, m) for m in range(3)), QSeries.zero())
    assert q_catalan(3, 1).at_one() == sum(skew_q_binomial(3, m, m).at_one() for m in range(4))


def test_reference_selection_matrices():
    full2 = [[2, 2, 2, 2], [0, 2, 2, 2], [0, 0, 2, 2], [0, 0, 0, 2]]
    assert selection_matrix(8, 1) == full2
    assert selection_matrix(8, 3) == [[1, 2, 2, 2], [0, 1, 2, 2], [0, 0, 1, 2], [0, 0, 0, 1]]
    assert selection_matrix(8, 5) == [[0, 1, 2, 2], [0, 0, 1, 2], [0, 0, 0, 1], [0, 0, 0, 0]]
    corner = [[0, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]
    assert selection_matrix(8, 9) == corner
    for s, k in ((2, 0), (4, 1), (6, 2)):
        assert selection_matrix(7, s) == [[int(n >= m + k) for n in range(4)] for m in range(4)]
    assert selection_matrix(7, 8) == corner


@pytest.mark.parametrize("big_n", range(1, 11))
def test_character_identities(big_n):
    for s in range(1, big_n + 2):
        if (big_n + s) % 2 == 0:
            continue
        closed = character_closed_form(big_n, s)
        assert closed == narayana_decomposition(big_n, s) == catalan_decomposition(big_n, s)
        assert closed.at_one() == binomial_count(big_n, s)
        assert closed.min_exponent == Fraction(1, 12) + conformal_weight(s)


def test_character_examples():
    assert character_closed_form(2, 1) == QSeries({Fraction(1, 12): 2})
    assert character_closed_form(8, 9) == QSeries.monomial(Fraction(1, 12) + conformal_weight(9))
    assert character_closed_form(8, 1).at_one() == 70
    assert any(e.denominator == 24 for e in character_closed_form(5, 2).terms)


def test_limit_truncation_examples():
    base = Fraction(1, 12)
    assert character_limit_truncation(1, 3) == (2 * partition_series(3)).shift(base)
    assert any((e - base + Fraction(1, 8)).denominator == 2
               for e in character_limit_truncation(2, 2).terms)


@pytest.mark.parametrize("s", (1, 2, 3))
def test_finite_characters_stabilize(s):
    limit = character_limit_truncation(s, 2)
    top = Fraction(1, 12) + conformal_weight(s) + 2
    for big_n in (12 + (s + 1) % 2, 14 + (s + 1) % 2):
        assert character_closed_form(big_n, s).truncate(top) == limit


def test_refinement():
    s1 = character_refinement(1, 4)
    assert [(t.r, t.multiplicity, t.jordan) for t in s1] == [(1, 2, True), (2, 2, False),
                                                            (3, 2, True), (4, 2, False)]
    s5 = character_refinement(5, 5)
    assert [(t.r, t.multiplicity) for t in s5] == [(2, 1), (3, 2), (4, 2), (5, 2)]
    assert s5[1].jordan and not s5[2].jordan
    for s in (1, 3, 5, 7):
        assert refinement_truncation(s, 4) == character_limit_truncation(s, 4)
    with pytest.raises(DomainError):
        character_refinement(2, 3)


def test_irreducible_limit_is_catalan_limit():
    big = finitized_irreducible(20, 2)
    lim = irreducible_limit_truncation(2, 3)
    assert big.truncate(lim.max_exponent) == lim
