"""Gamma-factor bookkeeping, archimedean Whittaker functions and the Gamma-sum reductions.

Everything above the ``numerical`` marker is exact.  The Gamma-sum
reductions mix s and 2s arguments at real s and are only checked in floating
point with mpmath; those helpers live at the bottom of the module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

import sympy

from ..errors import DomainError
from .coefficients import coefficient_data, w_coefficient
from .values import GENS, RING, GammaValue, ParityType, SymPoly, rational_to_qq


def _power_of_four(exponent) -> GammaValue:
    """``4**exponent`` for a half-integer exponent."""
    twice = Fraction(exponent) * 2
    if twice.denominator != 1:
        raise DomainError("4 is raised to half-integers only")
    return GammaValue(Fraction(2) ** int(twice))


def gamma_pole_ratio(a: int, b: int) -> GammaValue:
    """``lim_{e->0} Gamma(-a + e) / Gamma(-b + e)`` for integers a, b >= 0."""
    if a < 0 or b < 0:
        raise DomainError("pole orders are nonnegative")
    return GammaValue(Fraction((-1) ** abs(a - b) * factorial(b), factorial(a)))


def motivic_gamma(weights, k_p: int) -> GammaValue:
    """``Gamma_C(k_P) prod_i Gamma_C(1 + k_P - k_i)``, the Gamma factor at s = 0."""
    args = [k_p] + [1 + k_p - k for k in weights]
    if any(x <= 0 for x in args):
        raise DomainError(f"nonpositive Gamma_C argument in {args}")
    out = GammaValue.one()
    for x in args:
        out = out * GammaValue.gamma_c(x)
    return out


def c1_constant(k: int, l: int, m: int, r: int) -> GammaValue:
    """``i^(k - l2) 2^(3(3 + 2r - k - l2)) pi^6 / Gamma_3(k - r)``."""
    d = coefficient_data(k, l, m, r)
    l2 = d.lam.lam2
    return (GammaValue.imaginary_unit(k - l2) * GammaValue(Fraction(2) ** (3 * (3 + 2 * r - k - l2)))
            * GammaValue.pi(6) / GammaValue.gamma_m(3, k - r))


def critical_gamma_star(k: int, l: int, m: int, r: int) -> GammaValue:
    """``gamma*_{(k,m,l)}`` at ``s = (k - l1)/2 - r - 1``.

    Two Gamma factors sit at poles there (one upstairs, one downstairs); the
    value is the limit of their ratio.
    """
    d = coefficient_data(k, l, m, r)
    l1, l2 = d.lam.lam1, d.lam.lam2
    s0 = Fraction(k - l1, 2) - r - 1
    upper = s0 + Fraction(k - m - l, 2) + 1
    lower = s0 - Fraction(k - l1, 2) + l2 + 1
    if upper.denominator != 1 or upper > 0 or lower > 0:
        raise DomainError("expected a ratio of two poles at the critical point")
    value = gamma_pole_ratio(int(-upper), int(-lower))
    value = value * GammaValue.imaginary_unit(k + 2 * l2 + l1)
    value = value / (s0 + Fraction(k + l1, 2))
    exponent = l + m - Fraction(k - l1, 2) + l2
    value = value * GammaValue.pi(3 * s0 + 1) * _power_of_four(exponent) * GammaValue.pi(exponent)
    return value / (4 * GammaValue.gamma(s0 + Fraction(m + l - k, 2)) * GammaValue.gamma(2 * s0 + k))


def projection_constant_identity(k: int, l: int, m: int, r: int) -> bool:
    """Sign times gamma* equals ``C_1 b! c! (4 pi)^(-b-c) 2^(-3n+k+l+m) w_{0,b,c}``."""
    d = coefficient_data(k, l, m, r)
    sign = (-1) ** (k + (m + l + d.lam.lam1) // 2 + d.lam.lam2)
    lhs = critical_gamma_star(k, l, m, r) * sign
    four_pi = GammaValue(Fraction(4), 1)
    rhs = (c1_constant(k, l, m, r) * factorial(d.b) * factorial(d.c) * four_pi ** (-d.b - d.c)
           * GammaValue(Fraction(2) ** (-3 * d.n + k + l + m)) * w_coefficient(k, l, m, r))
    return lhs == rhs


# --- archimedean Whittaker functions ----------------------------------------

@dataclass(frozen=True)
class WhittakerExpansion:
    """``y^(k/2) * P(y) * exp(-2 pi y)`` with P a polynomial in y and Pi."""

    k: int
    t: int
    poly: SymPoly

    def to_sympy(self, y=None):
        y = sympy.Symbol("y", positive=True) if y is None else y
        poly = self.poly.to_sympy().subs(sympy.Symbol("y"), y)
        return sympy.expand(poly * y ** sympy.Rational(self.k, 2)) * sympy.exp(-2 * sympy.pi * y)

    def to_json(self) -> dict:
        return {"k": self.k, "t": self.t, "y_half_power": self.k, "poly": self.poly.to_json(),
                "exponential": "exp(-2*pi*y)"}


def whittaker_value(k: int, t: int) -> WhittakerExpansion:
    """Closed form of the t-th raised Whittaker function of weight k on diag(y, 1)."""
    if k < 1 or t < 0:
        raise DomainError("need k >= 1 and t >= 0")
    y, pi = GENS["y"], GENS["Pi"]
    poly = RING.zero
    for j in range(t + 1):
        coeff = Fraction(comb(t, j) * factorial(t + k - 1), factorial(j + k - 1)) * Fraction(-4) ** (j - t)
        poly += y ** j * pi ** j * rational_to_qq(coeff)
    return WhittakerExpansion(k, t, SymPoly(poly, GammaValue.pi(-t)))


def maass_shimura_expansion(k: int, t: int):
    """``y^(k/2+t) delta_k^t q`` at x = 0 via the expansion of delta^t in powers of d/dz.

    Returns a sympy expression in a positive symbol y.
    """
    x, y = sympy.symbols("x y", real=True)
    z = x + sympy.I * y
    q = sympy.exp(2 * sympy.pi * sympy.I * z)
    total = 0
    for a in range(t + 1):
        deriv = q
        for _ in range(a):
            deriv = _d_dz(deriv, x, y) / (2 * sympy.pi * sympy.I)
        total += (sympy.binomial(t, a) * sympy.gamma(t + k) / sympy.gamma(a + k)
                  * (-4 * sympy.pi * y) ** (a - t) * deriv)
    return _restrict(total, x, y, k, t)


def maass_shimura_iterated(k: int, t: int):
    """Same quantity by iterating ``delta_w = (1/(2 pi i)) (d/dz + w/(2 i y))``."""
    x, y = sympy.symbols("x y", real=True)
    f = sympy.exp(2 * sympy.pi * sympy.I * (x + sympy.I * y))
    for step in range(t):
        w = k + 2 * step
        f = (_d_dz(f, x, y) + w / (2 * sympy.I * y) * f) / (2 * sympy.pi * sympy.I)
    return _restrict(f, x, y, k, t)


def _d_dz(f, x, y):
    return (sympy.diff(f, x) - sympy.I * sympy.diff(f, y)) / 2


def _restrict(expr, x, y, k, t):
    yp = sympy.Symbol("y", positive=True)
    expr = (expr * y ** sympy.Rational(k + 2 * t, 2)).subs(x, 0).subs(y, yp)
    return sympy.expand(sympy.powsimp(sympy.expand(expr * sympy.exp(2 * sympy.pi * yp)))) \
        * sympy.exp(-2 * sympy.pi * yp)


def maass_shimura_consistent(k: int, t: int) -> bool:
    """Closed form, expansion of delta^t and iterated delta agree."""
    yp = sympy.Symbol("y", positive=True)
    closed = whittaker_value(k, t).to_sympy(yp)
    others = (maass_shimura_expansion(k, t), maass_shimura_iterated(k, t))
    factor = sympy.exp(2 * sympy.pi * yp)
    return all(sympy.expand(sympy.powsimp(sympy.expand((closed - e) * factor))) == 0 for e in others)


# --- numerical ------------------------------------------------------------------
# Floating-point checks only; nothing above depends on them.

def orloff_sum(alpha: int, t, beta, n: int):
    """``Gamma(alpha+N) sum_A (-1)^A C(N,A) Gamma(t+A) Gamma(t+alpha+beta+N-1+A) / (Gamma(alpha+A) Gamma(2t+beta+A))``."""
    import mpmath
    total = mpmath.mpf(0)
    for a in range(n + 1):
        total += ((-1) ** a * comb(n, a) * mpmath.gamma(t + a) * mpmath.gamma(t + alpha + beta + n - 1 + a)
                  / (mpmath.gamma(alpha + a) * mpmath.gamma(2 * t + beta + a)))
    return mpmath.gamma(alpha + n) * total


def orloff_closed_form(alpha: int, t, beta, n: int):
    import mpmath
    g = mpmath.gamma
    return ((-1) ** n * g(t) * g(t + alpha + beta + n - 1) * g(t + beta + n) * g(t - alpha + 1)
            / (g(2 * t + beta + n) * g(t + beta) * g(t - alpha - n + 1)))


def _relative_error(a, b):
    scale = max(abs(a), abs(b))
    return float(abs(a - b) / scale) if scale else 0.0


def gamma_sum_reductions(k: int, l: int, m: int, s, dps: int = 40) -> dict:
    """Relative errors of the two Gamma-sum reductions and of the final closed form at real s."""
    import mpmath
    with mpmath.workdps(dps):
        return _gamma_sum_reductions(k, l, m, s)


def _gamma_sum_reductions(k, l, m, s):
    import mpmath
    lam = ParityType.of_weights(k, l, m)
    l1, l2, l3 = lam.triple
    b = (k - l - l2) // 2
    c = (k - m - l3) // 2
    bs = mpmath.mpf(s) + mpmath.mpf(l3) / 2
    bk, bm = k - l2, m - l1
    g = mpmath.gamma
    errors = {"first": 0.0, "second": 0.0, "final": 0.0}
    for big_b in range(c + 1):
        lhs = orloff_sum(l, bs + mpmath.mpf(l) / 2, big_b + mpmath.mpf(bm - l) / 2, b)
        rhs = orloff_closed_form(l, bs + mpmath.mpf(l) / 2, big_b + mpmath.mpf(bm - l) / 2, b)
        errors["first"] = max(errors["first"], _relative_error(lhs, rhs))
    t2 = bs + mpmath.mpf(bm) / 2 + b
    beta2 = mpmath.mpf(l - bm) / 2 - b
    errors["second"] = _relative_error(orloff_sum(m, t2, beta2, c), orloff_closed_form(m, t2, beta2, c))
    double = mpmath.mpf(0)
    for a in range(b + 1):
        for big_b in range(c + 1):
            gamma_inf = (g(bs + mpmath.mpf(l) / 2 + a) * g(bs + mpmath.mpf(bm) / 2 + big_b)
                         * g(bs + mpmath.mpf(bk + l + bm) / 2 - 1 + a + big_b)
                         / g(2 * bs + mpmath.mpf(l + bm) / 2 + a + big_b))
            double += ((-1) ** (a + big_b) * comb(b, a) * comb(c, big_b) * gamma_inf
                       / (g(l + a) * g(m + big_b)))
    double *= g(l + b) * g(m + c)
    s = mpmath.mpf(s)
    final = ((-1) ** (b + c) * g(s + mpmath.mpf(k - l + m) / 2) * g(s + mpmath.mpf(k + l + m) / 2 - 1)
             * g(s + mpmath.mpf(k - l - m) / 2 + 1) * g(s + mpmath.mpf(k - m + l) / 2)
             / (g(2 * s + k) * g(bs - mpmath.mpf(bk) / 2 + 1)))
    errors["final"] = _relative_error(double, final)
    return errors
