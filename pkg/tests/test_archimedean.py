from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from triple_eis.archimedean import (
    GammaValue, SymPoly, admissible_tuples, binomial_identity_holds, d_lambda, gamma_sum_reductions,
    kernel_polynomial, leading_term_check, maass_shimura_consistent, motivic_gamma, omega_star,
    omega_star_literal, parity_violations, power_of_pi_identity, power_of_two_identity,
    projection_constant_identity, r_range, w_coefficient, w_coefficient_cross_check,
    whittaker_value, wishart_expectation,
)
from triple_eis.archimedean.coefficients import binomial_closed_form, binomial_sum, coefficient_data
from triple_eis.archimedean.operators import leading_constant, moment_by_differentiation
from triple_eis.archimedean.values import GENS, det3, symmetric_matrix
from triple_eis.errors import DomainError

S = sympy.Symbol("s")
U = symmetric_matrix("u")
TRACE = U[0][0] + U[1][1] + U[2][2]


# Wishart moments with density det(u)^(s-2) exp(-tr u): E[det u] = Gamma_3(s+1)/Gamma_3(s),
# tr u is Gamma(3s)-distributed.
@pytest.mark.parametrize("poly, expected", [
    (U[0][0], S),
    (det3(U), S * (S - sympy.Rational(1, 2)) * (S - 1)),
    (TRACE ** 2, 3 * S * (3 * S + 1)),
    (TRACE ** 3, 3 * S * (3 * S + 1) * (3 * S + 2)),
    (U[0][1] ** 2, S / 2),
])
def test_wishart_moments_closed_forms(poly, expected):
    value = wishart_expectation(SymPoly(poly)).to_sympy()
    assert sympy.expand(value - expected) == 0


monomials = st.lists(st.tuples(st.sampled_from(["u11", "u22", "u33", "u23", "u13", "u12"]),
                               st.integers(0, 2)), min_size=1, max_size=3)


@given(monomials, st.sampled_from([None, Fraction(1), Fraction(5, 2)]))
def test_pairing_trick_matches_direct_differentiation(parts, s):
    f = GENS["u11"] ** 0
    for name, e in parts:
        f = f * GENS[name] ** e
    assert wishart_expectation(SymPoly(f), s) == moment_by_differentiation(SymPoly(f), s)


@pytest.mark.parametrize("alpha, s", [(2, None), (3, None), (3, 2), (4, Fraction(7, 2))])
def test_omega_star_against_literal_expansion(alpha, s):
    assert omega_star(alpha, s) == omega_star_literal(alpha, s)


def test_omega_star_degree_and_base_case():
    t_names = ["T11", "T22", "T33", "T23", "T13", "T12"]
    assert omega_star(2) == SymPoly(1)
    for alpha in (3, 4):
        assert omega_star(alpha).degree_in(t_names) == 3 * (alpha - 2)
    with pytest.raises(DomainError):
        omega_star(1)


@pytest.mark.parametrize("alpha", range(2, 6))
def test_omega_star_parity(alpha):
    assert parity_violations(omega_star(alpha)) == 0


# frozen from GammaValue arithmetic; checked by hand via Gamma_C(x) = 2 (2 pi)^-x Gamma(x)
@pytest.mark.parametrize("weights, k_p, expected", [
    ((2, 2, 2), 2, 1 / (2 * sympy.pi ** 5)),
    ((3, 3, 2), 3, 1 / (4 * sympy.pi ** 7)),
])
def test_motivic_gamma_values(weights, k_p, expected):
    assert sympy.simplify(motivic_gamma(weights, k_p).to_sympy() - expected) == 0


def test_motivic_gamma_rejects_poles():
    with pytest.raises(DomainError):
        motivic_gamma((5, 2, 2), 3)


def test_whittaker_value_weight_two():
    # delta_2 q = q (1 - 1/(2 pi y)), times y^(k/2 + t) = y^2
    y = sympy.Symbol("y", positive=True)
    expected = (y ** 2 - y / (2 * sympy.pi)) * sympy.exp(-2 * sympy.pi * y)
    assert sympy.simplify(whittaker_value(2, 1).to_sympy(y) - expected) == 0


@pytest.mark.parametrize("k", range(1, 5))
@pytest.mark.parametrize("t", range(0, 3))
def test_maass_shimura_three_ways(k, t):
    assert maass_shimura_consistent(k, t)


# leading constants C2 frozen from kernel_polynomial expansions
@pytest.mark.parametrize("M, lam, expected", [
    (1, (0, 1, 1), GammaValue(Fraction(-8), 0, 1)),
    (3, (0, 1, 1), GammaValue(Fraction(-24), 0, 1)),
    (1, (1, 0, 1), GammaValue(Fraction(12), 0, 1)),
    (2, (1, 0, 1), GammaValue(Fraction(40), 0, 1)),
    (3, (1, 0, 1), GammaValue(Fraction(84), 0, 1)),
    (4, (1, 0, 1), GammaValue(Fraction(144), 0, 1)),
    (2, (1, 1, 2), GammaValue(Fraction(320))),
    (3, (1, 1, 2), GammaValue(Fraction(1344))),
    (4, (1, 1, 2), GammaValue(Fraction(3456))),
])
def test_leading_constants(M, lam, expected):
    assert leading_constant(M, lam) == expected
    assert leading_term_check(M, lam).holds


def test_d_lambda_pieces_commute():
    composed = d_lambda((0, 1, 1)) * d_lambda((1, 0, 1))
    assert composed == d_lambda((1, 0, 1)) * d_lambda((0, 1, 1))
    assert composed == d_lambda((1, 1, 2))
    f = kernel_polynomial(2, (0, 0, 0))
    assert composed.apply(f) == d_lambda((1, 0, 1)).apply(d_lambda((0, 1, 1)).apply(f))


@given(st.integers(0, 14).flatmap(
    lambda r1: st.tuples(st.just(r1), st.integers(0, r1)).flatmap(
        lambda t: st.tuples(st.just(t[0]), st.just(t[1]), st.integers(0, t[0] - t[1])))))
def test_binomial_identity(args):
    r1, b, c = args
    assert binomial_identity_holds(r1, b, c)
    assert binomial_sum(r1, b, c) == binomial_closed_form(r1, b, c)


def test_binomial_identity_domain():
    with pytest.raises(DomainError):
        binomial_identity_holds(3, 2, 2)


@pytest.mark.parametrize("k, l, m, r", [(2, 2, 2, 0), (3, 3, 2, 0), (4, 4, 3, 1), (5, 4, 3, 1), (5, 5, 5, 2)])
def test_w_coefficient_cross_check(k, l, m, r):
    report = w_coefficient_cross_check(k, l, m, r)
    assert report.laurent_shape
    assert report.holds


def test_w_coefficient_is_never_zero():
    assert all(not w_coefficient(*t).is_zero() for t in admissible_tuples(8))


@pytest.mark.parametrize("tup", list(admissible_tuples(7)))
def test_constant_bookkeeping(tup):
    assert power_of_two_identity(*tup)
    assert power_of_pi_identity(*tup)
    assert projection_constant_identity(*tup)


def test_r_range_and_out_of_range():
    assert list(r_range(6, 4, 4)) == [2]
    with pytest.raises(DomainError):
        coefficient_data(6, 4, 4, 3)
    with pytest.raises(DomainError):
        w_coefficient(7, 3, 3, 0)  # not balanced


@pytest.mark.parametrize("k, l, m, s", [(4, 4, 4, "0.7"), (6, 5, 3, "1.3"), (7, 6, 5, "2.25")])
def test_gamma_sum_reductions(k, l, m, s):
    errors = gamma_sum_reductions(k, l, m, s)
    assert max(errors.values()) < 1e-30


@given(st.integers(-20, 20), st.integers(1, 20), st.integers(-6, 6), st.integers(0, 3),
       st.integers(-20, 20), st.integers(1, 20), st.integers(-6, 6), st.integers(0, 3))
def test_gamma_value_arithmetic_against_sympy(a, b, e, i, c, d, f, j):
    x = GammaValue(Fraction(a, b), Fraction(e, 2), i)
    y = GammaValue(Fraction(c, d), Fraction(f, 2), j)
    assert sympy.simplify((x * y).to_sympy() - x.to_sympy() * y.to_sympy()) == 0
    if c:
        assert sympy.simplify((x / y).to_sympy() - x.to_sympy() / y.to_sympy()) == 0


@pytest.mark.parametrize("x", [Fraction(1, 2), Fraction(1), Fraction(7, 2), Fraction(6)])
def test_gamma_at_half_integers(x):
    value = GammaValue.gamma(x).to_sympy()
    assert sympy.simplify(value - sympy.gamma(sympy.Rational(x.numerator, x.denominator))) == 0


def test_json_round_trips():
    g = GammaValue(Fraction(-3, 7), Fraction(5, 2), 1)
    assert GammaValue.from_json(g.to_json()) == g
    p = omega_star(3)
    assert SymPoly.from_json(p.to_json()) == p
    q = kernel_polynomial(1, (1, 0, 1))
    assert SymPoly.from_json(q.to_json()) == q
