"""Exact arithmetic substrate: p-adic numbers, cyclotomic rings, Iwasawa series."""

from .cyclotomic import CyclotomicElement, cyclotomic_polynomial, ramanujan_sum
from .iwasawa import (
    DEFAULT_CAPS, VARIABLES, ArithmeticPoint, GroupLikeSum, IwasawaSeries,
    diamond_bracket, diamond_exponent, generator, series_specialize,
)
from .padic import DEFAULT_PRECISION, PadicNumber, iwasawa_log, padic_log, teichmuller, valuation

__all__ = [
    "ArithmeticPoint", "CyclotomicElement", "DEFAULT_CAPS", "DEFAULT_PRECISION",
    "GroupLikeSum", "IwasawaSeries", "PadicNumber", "VARIABLES", "cyclotomic_polynomial",
    "diamond_bracket", "diamond_exponent", "generator", "iwasawa_log", "padic_log",
    "ramanujan_sum", "series_specialize", "teichmuller", "valuation",
]
