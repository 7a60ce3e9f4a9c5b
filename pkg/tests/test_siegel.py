from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from triple_eis.errors import DomainError
from triple_eis.siegel import (
    HalfIntegralMatrix, a_B, jordan_representative, polynomial_coefficients, relevant_primes,
    series_from_polynomial, siegel_coefficient, siegel_polynomial, siegel_series,
)


def matrix(*entries):
    return HalfIntegralMatrix.from_entries(entries)


# values read off the character-sum oracle (siegel_coefficient) and frozen
@pytest.mark.parametrize("entries, ell, expected", [
    ((9,), 3, (1, 3, 9)),
    ((2,), 2, (1, 2)),
    ((1, 1, 1, 1, 1, 1), 2, (1, -4)),
    ((1, 1, 1, 1, 1, 1), 3, (1,)),
    ((1, 1, 1, 1, 1, 1), 5, (1,)),
])
def test_frozen_polynomials(entries, ell, expected):
    assert polynomial_coefficients(matrix(*entries), ell) == expected


def test_oracle_coefficients_of_the_all_ones_matrix():
    # b_2(B, X) through X^3 by direct enumeration
    B = matrix(1, 1, 1, 1, 1, 1)
    assert [siegel_coefficient(B, 2, j) for j in range(4)] == [1, -5, 0, 20]
    assert siegel_series(B, 2)[:4] == [1, -5, 0, 20]


size1 = st.builds(lambda b: matrix(b), st.integers(1, 60))
size2 = st.builds(lambda a, b, c: matrix(a, b, c), st.integers(1, 8), st.integers(1, 8),
                  st.integers(-8, 8))


@given(st.one_of(size1, size2), st.sampled_from([2, 3, 5]))
def test_density_route_matches_enumeration(B, ell):
    assume(B.is_positive_definite())
    coeffs = polynomial_coefficients(B, ell)
    depth = 3 if B.size == 1 else (2 if ell < 5 else 1)
    expected = series_from_polynomial(B, ell, coeffs, depth)
    assert [siegel_coefficient(B, ell, j) for j in range(depth + 1)] == expected


@given(st.one_of(size1, size2), st.sampled_from([2, 3, 5, 7]))
def test_shape_of_F(B, ell):
    assume(B.is_positive_definite())
    coeffs = polynomial_coefficients(B, ell)
    assert coeffs[0] == 1
    assert all(isinstance(c, int) for c in coeffs)
    if B.det2() % ell:
        assert coeffs == (1,)


unimodular = st.sampled_from([
    ((1, 0, 0), (0, 1, 0), (0, 0, 1)),
    ((1, 1, 0), (0, 1, 0), (0, 0, 1)),
    ((0, 1, 0), (1, 0, 0), (0, 0, 1)),
    ((1, 0, -1), (0, 1, 2), (0, 0, 1)),
    ((1, 2, 3), (0, 1, 4), (0, 0, 1)),
    ((2, 1, 0), (1, 1, 0), (0, 0, -1)),
])
size3 = st.builds(lambda d, o: matrix(*d, *o), st.tuples(*[st.integers(1, 4)] * 3),
                  st.tuples(*[st.integers(-3, 3)] * 3))


@given(size3, unimodular, st.sampled_from([2, 3, 5]))
def test_F_is_a_class_invariant(B, U, ell):
    assume(B.is_positive_definite())
    assert polynomial_coefficients(B.transform(U), ell) == polynomial_coefficients(B, ell)
    assert polynomial_coefficients(jordan_representative(B, ell), ell) == \
        polynomial_coefficients(B, ell)


@given(st.one_of(size1, size3), st.sampled_from([3, 5, 7]))
def test_functional_equation_for_odd_size(B, ell):
    # F(l^(-n-1) / X) = eta * (l^((n+1)/2) X)^(-deg) * F(X) with eta = +-1
    assume(B.is_positive_definite())
    n = B.size
    c = polynomial_coefficients(B, ell)
    d = len(c) - 1
    eta = Fraction(c[d], ell ** ((n + 1) * d // 2))
    assert eta in (1, -1)
    for i in range(d + 1):
        assert c[d - i] == eta * c[i] * Fraction(ell) ** ((n + 1) * (d - 2 * i) // 2)


def test_siegel_polynomial_reports_oracle_depth():
    poly = siegel_polynomial(matrix(1, 1, 1, 1, 1, 1), 2, max_terms=10 ** 6)
    assert poly.coefficients == (1, -4)
    assert poly.verified_depth == 3
    assert poly(Fraction(1, 4)) == 0
    assert poly.to_json() == {"prime": 2, "coefficients": [1, -4], "verified_depth": 3}


def test_a_B_multiplies_local_factors():
    B = matrix(1, 1, 1, 1, 1, 1)     # det 2B = 4
    assert relevant_primes(B) == [2]
    assert a_B(B, (), lambda ell: Fraction(1, ell)) == Fraction(1, 1) - 4 * Fraction(1, 2)
    assert a_B(B, (2,), lambda ell: 0) == 1


def test_matrix_validation():
    with pytest.raises(DomainError):
        HalfIntegralMatrix.from_entries((1, 2))
    with pytest.raises(DomainError):
        HalfIntegralMatrix((1, 1), (1, 2))
    B = matrix(1, 2, 3, 1, 1, 1)
    assert B.det2() == 2 * (4 * 6 - 1) - 1 * (6 - 1) + 1 * (1 - 4)
    assert HalfIntegralMatrix.from_doubled_matrix(B.doubled_matrix()) == B
