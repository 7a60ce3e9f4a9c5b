from fractions import Fraction
from math import gcd

import pytest
import sympy
from hypothesis import given, strategies as st

from triple_eis.arith_core import (
    ArithmeticPoint, CyclotomicElement, GroupLikeSum, IwasawaSeries, PadicNumber,
    cyclotomic_polynomial, iwasawa_log, padic_log, ramanujan_sum, teichmuller, valuation,
)
from triple_eis.errors import DomainError, PrecisionError

PRIMES = st.sampled_from([3, 5, 7, 11])
nonzero_int = st.integers(-10 ** 6, 10 ** 6).filter(bool)
rationals = st.builds(Fraction, nonzero_int, st.integers(1, 10 ** 4))


def embed(x, p, prec=20):
    return PadicNumber.from_rational(x, p, prec)


def reduce_mod(x: Fraction, p: int, n: int) -> int:
    """Oracle: residue of a p-integral rational modulo p^n."""
    return x.numerator * pow(x.denominator, -1, p ** n) % p ** n


# --- p-adic numbers ----------------------------------------------------------

@given(PRIMES, rationals, rationals)
def test_field_operations_match_rational_arithmetic(p, x, y):
    a, b = embed(x, p), embed(y, p)
    assert a + b == embed(x + y, p)
    assert a - b == embed(x - y, p)
    assert a * b == embed(x * y, p, 20 + min(valuation(x, p), valuation(y, p)))
    assert (a / b) * b == a


@given(PRIMES, rationals)
def test_valuation_and_residue(p, x):
    a = embed(x, p, 30)
    assert a.valuation() == valuation(x, p)
    if valuation(x, p) >= 0:
        assert a.residue(10) == reduce_mod(x, p, 10)


@given(PRIMES, rationals)
def test_json_round_trip(p, x):
    a = embed(x, p)
    assert PadicNumber.from_json(a.to_json()) == a
    assert PadicNumber.from_json(a.to_json()).abs_prec == a.abs_prec


def test_precision_is_tracked():
    a = PadicNumber.from_rational(1, 5, 10)
    b = PadicNumber.from_rational(1 + 5 ** 12, 5, 20)
    assert (b - a).is_zero()
    assert (b - a).abs_prec == 10
    with pytest.raises(PrecisionError):
        a.equal_mod(b, 15)
    with pytest.raises(PrecisionError):
        PadicNumber.zero(5, 4).valuation()


def test_constructor_rejects_non_unit():
    with pytest.raises(DomainError):
        PadicNumber(5, 0, 10, 5)


@given(PRIMES, st.integers(1, 10 ** 6))
def test_teichmuller_is_a_root_of_unity_lifting_the_residue(p, a):
    if a % p == 0:
        return
    w = teichmuller(a, p, 15)
    assert w.residue(1) == a % p
    assert w ** (p - 1) == PadicNumber.one(p, 15)


def _log_series(y: Fraction, p: int, prec: int) -> Fraction:
    """Oracle: partial sum of log(1+y) for v_p(y) >= 1, exact through p^prec."""
    total, n = Fraction(0), 1
    while n - n.bit_length() <= prec + 1:
        total += Fraction((-1) ** (n + 1)) * y ** n / n
        n += 1
    return total


@given(PRIMES, st.integers(1, 10 ** 5))
def test_log_matches_series_oracle(p, m):
    y = Fraction(p * m)
    x = embed(1 + y, p, 15)
    assert padic_log(x).equal_mod(embed(_log_series(y, p, 15), p, 15), 15)


@given(PRIMES, st.integers(1, 10 ** 4), st.integers(1, 10 ** 4))
def test_log_is_a_homomorphism(p, m, n):
    x, y = embed(1 + p * m, p), embed(1 + p * n, p)
    assert padic_log(x * y) == padic_log(x) + padic_log(y)


def test_iwasawa_branch_kills_p():
    assert iwasawa_log(embed(5, 5)).is_zero()
    assert iwasawa_log(embed(125 * 6, 5)) == padic_log(embed(6, 5))


# --- cyclotomic rings ----------------------------------------------------------

@pytest.mark.parametrize("m", [1, 2, 3, 4, 6, 12, 20, 30])
def test_cyclotomic_polynomial_matches_sympy(m):
    x = sympy.Symbol("x")
    expected = sympy.Poly(sympy.cyclotomic_poly(m, x), x).all_coeffs()[::-1]
    assert list(cyclotomic_polynomial(m)) == [int(c) for c in expected]


@pytest.mark.parametrize("m", [4, 5, 12, 20])
def test_ramanujan_sum_matches_trace_of_primitive_roots(m):
    for r in range(0, 2 * m):
        direct = sum(sympy.exp(2 * sympy.pi * sympy.I * a * r / m)
                     for a in range(1, m + 1) if gcd(a, m) == 1)
        assert ramanujan_sum(m, r) == sympy.nsimplify(sympy.N(direct, 30))


@given(st.sampled_from([5, 8, 12, 20]), st.integers(0, 40), st.integers(0, 40))
def test_roots_of_unity_multiply(m, a, b):
    za, zb = CyclotomicElement.zeta_power(m, a), CyclotomicElement.zeta_power(m, b)
    assert za * zb == CyclotomicElement.zeta_power(m, a + b)
    assert CyclotomicElement.zeta_power(m, a) ** m == CyclotomicElement.rational(m, 1)


def test_sum_of_all_roots_vanishes():
    total = CyclotomicElement.rational(12, 0)
    for k in range(12):
        total = total + CyclotomicElement.zeta_power(12, k)
    assert total.is_zero()


# --- Iwasawa series ------------------------------------------------------------

points = st.builds(lambda k1, k2, k3, kP: ArithmeticPoint((k1, k2, k3), kP),
                   st.integers(0, 12), st.integers(0, 12), st.integers(0, 12), st.integers(0, 12))


@given(points, st.dictionaries(st.tuples(*[st.integers(-50, 50)] * 4), st.integers(1, 10 ** 6),
                               min_size=1, max_size=4))
def test_truncated_series_specializes_like_group_like_sum(point, terms):
    p = 5
    f = GroupLikeSum(p, 12, terms)
    series = f.to_series((3, 3, 3, 3))
    exact = f.specialize(point)
    truncated = series.specialize(point)
    assert truncated.abs_prec >= 4
    assert truncated.equal_mod(exact, truncated.abs_prec)


def test_series_json_round_trip():
    f = GroupLikeSum(5, 10, {(1, 2, 0, -3): 7, (0, 0, 4, 1): 2})
    s = f.to_series((2, 2, 2, 2))
    assert IwasawaSeries.from_json(s.to_json()) == s
    g = GroupLikeSum.from_json(f.to_json())
    assert g.terms == f.terms


def test_series_variable_specializes_to_u_power_minus_one():
    x = IwasawaSeries.variable("X2", 5, prec=10)
    value = x.specialize(ArithmeticPoint((1, 3, 1), 2))
    assert value.equal_mod(embed(6 ** 3 - 1, 5, 10), value.abs_prec)


def test_arithmetic_point_predicates():
    pt = ArithmeticPoint.parse("4,4,4,4")
    assert pt.is_balanced() and pt.is_critical()
    assert not ArithmeticPoint((2, 2, 6), 6).is_balanced()
    with pytest.raises(DomainError):
        ArithmeticPoint.parse("4,4,4")
