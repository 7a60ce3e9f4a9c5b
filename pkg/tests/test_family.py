import itertools

import pytest
from hypothesis import given, strategies as st

from triple_eis.arith_core import ArithmeticPoint
from triple_eis.errors import DomainError
from triple_eis.family import (
    FamilyConfig, PointGrid, QExpansion, balanced_critical_points, diagonals, direct_coefficient,
    enumerate_matrices, family_coefficient, interpolation_check, q_expansion,
)
from triple_eis.siegel import HalfIntegralMatrix

P = 5
CONFIG = FamilyConfig(p=P, a=2)
POINTS = balanced_critical_points(6)


def test_balanced_critical_point_count():
    # brute-force count of (k1,k2,k3,kP), 2 <= k_i <= 6, balanced, max k <= kP <= sum - max - 2
    count = 0
    for ks in itertools.product(range(2, 7), repeat=3):
        top = max(ks)
        if sum(ks) > 2 * top:
            count += len(range(top, sum(ks) - top - 1))
    assert len(POINTS) == count == 120


def test_enumerated_matrices_lie_in_xi_and_are_positive():
    mats = enumerate_matrices((5, 5, 10), P)
    assert mats
    assert all(B.in_xi(P) and B.is_positive_definite() for B in mats)
    with pytest.raises(DomainError):
        enumerate_matrices((5, 5, 6), P)


xi_matrices = st.sampled_from(enumerate_matrices((5, 5, 5), P) + enumerate_matrices((5, 10, 5), P))


@given(xi_matrices, st.sampled_from(POINTS), st.sampled_from([0, 1, 2, 3]))
def test_family_specializes_to_classical_coefficient(B, point, a):
    config = FamilyConfig(p=P, a=a)
    family = family_coefficient(B, config).specialize(point)
    assert family.equal_mod(direct_coefficient(B, point, config), 20)


def test_outside_xi_everything_vanishes():
    B = HalfIntegralMatrix((5, 5, 5), (5, 1, 1))
    assert family_coefficient(B, CONFIG).specialize(ArithmeticPoint((4, 4, 4), 4)).is_zero()
    assert direct_coefficient(B, ArithmeticPoint((4, 4, 4), 4), CONFIG).is_zero()


def test_vectorized_grid_matches_scalar_routes():
    grid = PointGrid(CONFIG, POINTS[:15])
    for B in enumerate_matrices((5, 5, 5), P)[:25]:
        fam = grid.family_values(family_coefficient(B, CONFIG))
        direct = grid.direct_values(B)
        for i, pt in enumerate(POINTS[:15]):
            assert direct[i] == direct_coefficient(B, pt, CONFIG).to_int()
            assert fam[i] == direct[i]


def test_interpolation_on_small_diagonals():
    report = interpolation_check(CONFIG, 5, POINTS)
    assert report.matrices == len(enumerate_matrices((5, 5, 5), P))
    assert report.ok


def test_non_critical_points_are_rejected():
    B = enumerate_matrices((5, 5, 5), P)[0]
    with pytest.raises(DomainError):
        direct_coefficient(B, ArithmeticPoint((2, 2, 6), 6), CONFIG)


def test_q_expansion_json_round_trip_and_specialization():
    config = FamilyConfig(p=P, a=2, caps=(3, 3, 3, 3))
    for as_series in (True, False):
        exp = q_expansion(config, 5, as_series=as_series)
        assert list(exp.coefficients) == diagonals(5, P) == [(5, 5, 5)]
        back = QExpansion.from_json(exp.to_json())
        point = ArithmeticPoint((3, 4, 5), 5)
        original, restored = exp.specialize(point), back.specialize(point)
        value = original.coefficients[(5, 5, 5)]
        assert restored.coefficients[(5, 5, 5)] == value
        direct = sum((direct_coefficient(B, point, config).to_int()
                      for B in enumerate_matrices((5, 5, 5), P)))
        assert value.residue(value.abs_prec) == direct % P ** value.abs_prec
        # caps 3 determine a value only modulo p^(3+1)
        assert value.abs_prec == (4 if as_series else 20)


@pytest.mark.parametrize("kwargs", [
    {"p": 4}, {"p": 2}, {"N": 5}, {"N": 4}, {"chi": (0, 0)}, {"caps": (1, 1, 1)},
])
def test_config_validation(kwargs):
    with pytest.raises(DomainError):
        FamilyConfig(**kwargs)


def test_config_reduces_character_exponents():
    assert FamilyConfig(p=5, a=6, chi=(4, 5, -1)).chi == (0, 1, 3)
    assert FamilyConfig(p=5, a=6).a == 2
    assert FamilyConfig(p=7, N=6).excluded_primes == (2, 3, 7)
