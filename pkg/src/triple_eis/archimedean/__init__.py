"""Symbolic archimedean calculus: omega*, the operators D_lambda and the Gamma bookkeeping."""

from .coefficients import (
    admissible_tuples, binomial_identity_holds, coefficient_data, power_of_pi_identity,
    power_of_two_identity, r_range, w_coefficient, w_coefficient_cross_check,
)
from .gamma_factors import (
    critical_gamma_star, gamma_sum_reductions, maass_shimura_consistent, motivic_gamma,
    projection_constant_identity, whittaker_value,
)
from .operators import (
    d_lambda, kernel_polynomial, leading_term_check, omega_star, omega_star_literal,
    parity_violations, wishart_expectation,
)
from .values import PARITY_TYPES, GammaValue, ParityType, SymPoly

__all__ = [
    "GammaValue", "PARITY_TYPES", "ParityType", "SymPoly", "admissible_tuples",
    "binomial_identity_holds", "coefficient_data", "critical_gamma_star", "d_lambda",
    "gamma_sum_reductions", "kernel_polynomial", "leading_term_check", "maass_shimura_consistent",
    "motivic_gamma", "omega_star", "omega_star_literal", "parity_violations",
    "power_of_pi_identity", "power_of_two_identity", "projection_constant_identity", "r_range",
    "w_coefficient", "w_coefficient_cross_check", "whittaker_value", "wishart_expectation",
]
