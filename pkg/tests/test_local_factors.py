import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from triple_eis.arith_core.cyclotomic import CyclotomicElement
from triple_eis.arith_core.padic import PadicNumber
from triple_eis.errors import DomainError, UnsupportedError
from triple_eis.local_factors import (
    SHAPES, LocalRepGL2, RationalFunctionT, central_vanishing_order,
    degeneration_table, ep_adjoint, epsilon_signs, functional_equation_check,
    functional_equation_trials, gamma_gl1, l_invariants, q_b_value, signs_from_local_factors,
    tate_period, triple_L, trivial_zero_classify, whittaker_grid_check, whittaker_value_p,
)
from triple_eis.local_factors.elliptic import (
    CASE_I, CASE_II, NONE, EllipticCurveLocal, EllipticLocalData, gauss_sum, j_of_q, j_series,
    unit_root,
)
from triple_eis.local_factors.factors import functional_equation_sides
from triple_eis.local_factors.whittaker import in_xi

Q = 7


def expand(roots):
    """Coefficients of prod (1 - r t), lowest degree first."""
    out = [Fraction(1)]
    for r in roots:
        out = [a - r * b for a, b in zip(out + [0], [0] + out)]
    return out


def poly_value(coeffs, t):
    return sum(c * t ** k for k, c in enumerate(coeffs))


def as_rational(value):
    out = value.rational_value()
    assert out is not None
    return out


# --- rational functions in t = q^-s ------------------------------------------

units = st.fractions(min_value=-9, max_value=9, max_denominator=9).filter(lambda x: x != 0)


@given(units, units, st.integers(-3, 3), st.integers(1, 3))
def test_reflect_is_an_involution(c, r, power, mult):
    f = RationalFunctionT(Q, c, power, [(r, mult), (2 * r, -1)])
    assert f.reflect().reflect() == f
    assert f.shift(3).shift(-3) == f


@given(units, units, units)
def test_evaluation_matches_direct_formula(c, r, t0):
    f = RationalFunctionT(Q, c, 2, [(r, 1), (3, -1)])
    if r * t0 == 1 or 3 * t0 == 1:
        return
    expected = c * t0 ** 2 * (1 - r * t0) / (1 - 3 * t0)
    assert as_rational(f.evaluate(t0)) == expected


def test_gamma_gl1_value():
    # (1 - c t)/(1 - 1/(c q t)) at c = 2, q = 5, t = 1/3
    assert as_rational(gamma_gl1(5, 2).evaluate(Fraction(1, 3))) == Fraction(10, 21)


def test_triple_L_of_principal_series_is_the_eight_fold_product():
    rng = random.Random(3)
    for _ in range(10):
        params = [(Fraction(rng.randint(1, 9), rng.randint(1, 9)),
                   Fraction(rng.randint(1, 9), rng.randint(1, 9))) for _ in range(3)]
        reps = [LocalRepGL2.principal_series(Q, a, b) for a, b in params]
        roots = [x * y * z for x, y, z in product(*params)]
        num, den = triple_L(reps).polynomials()
        t0 = Fraction(1, 11)
        value = poly_value([as_rational(c) for c in num], t0) / poly_value([as_rational(c) for c in den], t0)
        assert value == 1 / poly_value(expand(roots), t0)


@pytest.mark.parametrize("shape", SHAPES)
def test_functional_equation_random_trials(shape):
    assert functional_equation_trials(shape, Q, 40, random.Random(shape)) == []


def test_functional_equation_detects_a_wrong_twist():
    reps = [LocalRepGL2.principal_series(Q, 2, Fraction(1, 3)), LocalRepGL2.steinberg(Q),
            LocalRepGL2.steinberg(Q, -1)]
    assert functional_equation_check(reps, 5)
    left, right = functional_equation_sides(reps, 5)
    assert left != right * RationalFunctionT(Q, 2)


def test_degeneration_table():
    rng = random.Random(11)
    pairs = [(LocalRepGL2.principal_series(Q, 1, 1), LocalRepGL2.principal_series(Q, 1, 1))]
    for _ in range(5):
        pairs.append(tuple(LocalRepGL2.principal_series(Q, Fraction(rng.randint(1, 9), rng.randint(1, 9)),
                                                        Fraction(rng.randint(-9, -1), rng.randint(1, 9)))
                           for _ in range(2)))
    for first, second in pairs:
        for name, (lhs, rhs) in degeneration_table(first, second).items():
            assert lhs == rhs, name


def test_degeneration_table_negative_control():
    first = LocalRepGL2.principal_series(Q, 2, 3)
    second = LocalRepGL2.principal_series(Q, 5, Fraction(1, 2))
    table = degeneration_table(first, second)
    lhs, rhs = table["L(pi1 x pi2 x St)"]
    assert lhs != rhs.shift(1)
    with pytest.raises(DomainError):
        degeneration_table(LocalRepGL2.steinberg(Q), second)


# --- elliptic curves at p ------------------------------------------------------

def curve(conductor, reduction, ap, a_ell=None):
    return EllipticCurveLocal(conductor, reduction, ap, a_ell or {})


def test_unit_root_solves_the_hecke_polynomial():
    for ap in (1, 2, -3, 4):
        a = unit_root(ap, 5, 25)
        assert a.is_unit()
        assert (a * a - ap * a + 5).is_zero()


def test_classification_and_vanishing_order():
    split = curve(5, "split-mult", 1, {5: 1})
    data = EllipticLocalData(5, [split, split, split])
    assert trivial_zero_classify(data).case == CASE_I
    assert central_vanishing_order(data) == 3

    ordinary = curve(1, "good-ordinary", 2)
    data = EllipticLocalData(5, [split, ordinary, ordinary])
    result = trivial_zero_classify(data)
    assert result.case == CASE_II and result.special_index == 0
    assert central_vanishing_order(data) == 2

    data = EllipticLocalData(5, [ordinary, curve(1, "good-ordinary", 1), curve(1, "good-ordinary", -1)])
    assert trivial_zero_classify(data).case == NONE
    assert central_vanishing_order(data) == 0


def test_curve_validation():
    with pytest.raises(DomainError):
        EllipticLocalData(5, [curve(4, "good-ordinary", 1, {2: 1})] * 3)  # not square-free
    with pytest.raises(DomainError):
        EllipticLocalData(5, [curve(5, "split-mult", -1, {5: -1})] * 3)
    with pytest.raises(DomainError):
        EllipticLocalData(5, [curve(1, "good-ordinary", 5)] * 3)


def test_ep_adjoint_examples():
    # unramified: (1 - p/alpha^2)(1 - 1/alpha^2) at alpha = 2, p = 5, k = 2
    assert ep_adjoint(5, 2, 0, Fraction(2)) == Fraction(-3, 16)
    assert ep_adjoint(5, 2, 1, Fraction(2)) == Fraction(-1, 4)
    with pytest.raises(UnsupportedError):
        ep_adjoint(5, 2, 2, Fraction(2), p_part_exponent=1)
    with pytest.raises(DomainError):
        ep_adjoint(5, 2, 0, Fraction(2), p_part_exponent=1)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_gauss_sums(p):
    assert gauss_sum(0, p) == CyclotomicElement.rational(p * (p - 1), -1)
    for e in range(1, p - 1):
        # g(e) g(-e) = omega^e(-1) p
        assert gauss_sum(e, p) * gauss_sum(p - 1 - e, p) == CyclotomicElement.rational(p * (p - 1), (-1) ** e * p)


def test_j_series_coefficients():
    assert j_series(5)[:4] == [1, 744, 196884, 21493760]


def test_tate_period_round_trip():
    p = 7
    q = PadicNumber.from_rational(Fraction(p ** 2 * (1 + 3 * p)), p, 26)
    found = tate_period(j_of_q(q), 22)
    assert found.equal_mod(q, 20)


def test_l_invariants_case_i():
    p, prec = 5, 20
    period = PadicNumber.from_rational(p ** 3 * (1 + p), p, prec)
    split = curve(5, "split-mult", 1, {5: 1})
    data = EllipticLocalData(p, [split, split, split])
    result = l_invariants(data, periods=[period] * 3)
    # l = -log(1 + p) / (2 * 3), log(1 + p) summed directly
    log = sum(Fraction((-1) ** (n + 1) * p ** n, n) for n in range(1, 40))
    ell = PadicNumber.from_rational(-log / 6, p, prec)
    assert result.ell[0].equal_mod(ell, 15)
    assert result.big_l.equal_mod(-8 * ell ** 3, 15)


def test_root_numbers_agree():
    p = 5
    curves = [curve(11, "good-ordinary", 1, {11: 1}), curve(11, "good-ordinary", 2, {11: -1}),
              curve(11, "good-ordinary", -1, {11: -1})]
    data = EllipticLocalData(p, curves)
    signs = epsilon_signs(data)
    assert signs.sigma_minus == (11,)
    assert signs.epsilon == 1
    assert signs_from_local_factors(data) == signs


# --- p-adic Whittaker values ----------------------------------------------------

def test_trivial_characters_give_indicator_of_xi():
    p = 5
    assert q_b_value((5, 10, 5, Fraction(1, 2), 1, 2), p, (0, 0, 0, 0)) == CyclotomicElement.rational(20, 1)
    assert q_b_value((1, 10, 5, Fraction(1, 2), 1, 2), p, (0, 0, 0, 0)).is_zero()
    assert not in_xi((5, 5, 5, Fraction(5, 2), 1, 1), p)


@given(st.sampled_from([3, 5]), st.lists(st.integers(0, 12), min_size=3, max_size=3),
       st.lists(st.integers(-12, 12), min_size=3, max_size=3), st.lists(st.integers(0, 3), min_size=4, max_size=4))
def test_transform_route_matches_closed_form(p, diag, doubled, exps):
    entries = tuple(diag) + tuple(Fraction(c, 2) for c in doubled)
    exps = [e % (p - 1) for e in exps]
    assert whittaker_value_p(entries, p, exps) == q_b_value(entries, p, exps)


def test_grid_check_counts_small_bound():
    report = whittaker_grid_check(3, 2, (0, 1))
    # positive definite half-integral B with diagonal in 1..2, by brute force
    count = 0
    for b11, b22, b33 in product(range(1, 3), repeat=3):
        for c23, c13, c12 in product(range(-6, 7), repeat=3):
            d1, d2, d3 = 2 * b11, 2 * b22, 2 * b33
            det = d1 * (d2 * d3 - c23 ** 2) - c12 * (c12 * d3 - c23 * c13) + c13 * (c12 * c23 - d2 * c13)
            if d1 * d2 - c12 ** 2 > 0 and det > 0:
                count += 1
    assert report.matrices == count
    assert report.comparisons == count * 16
    assert report.ok
