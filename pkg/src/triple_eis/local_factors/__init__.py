"""Local factors at finite primes, the p-adic Whittaker check and elliptic-curve tools."""

from .elliptic import (
    EllipticCurveLocal, EllipticLocalData, central_vanishing_order, ep_adjoint, epsilon_signs,
    l_invariants, signs_from_local_factors, tate_period, trivial_zero_classify, trivial_zero_sweep,
)
from .factors import (
    SHAPES, LocalRepGL2, QuadraticValue, RationalFunctionT, ScaledValue, central_point,
    degeneration_table, functional_equation_check, functional_equation_trials, gamma_gl1,
    modified_euler_factor, random_representation, triple_epsilon, triple_L,
)
from .whittaker import q_b_value, whittaker_grid_check, whittaker_value_p

__all__ = [
    "EllipticCurveLocal", "EllipticLocalData", "LocalRepGL2", "QuadraticValue",
    "RationalFunctionT", "SHAPES", "ScaledValue", "central_point", "central_vanishing_order",
    "degeneration_table", "ep_adjoint", "epsilon_signs", "functional_equation_check",
    "functional_equation_trials", "gamma_gl1", "l_invariants", "modified_euler_factor",
    "random_representation", "q_b_value", "signs_from_local_factors", "tate_period",
    "triple_L", "triple_epsilon", "trivial_zero_classify", "trivial_zero_sweep",
    "whittaker_grid_check", "whittaker_value_p",
]
