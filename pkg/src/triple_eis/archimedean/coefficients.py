"""The coefficients w_{0,b,c} of the constant term in y1 and their symbolic cross-check."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

from ..errors import DomainError
from .operators import apply_D_lambda, omega_star, substitute_zero_diagonal
from .values import GENS, INDEX, RING, GammaValue, ParityType, SymPoly


@dataclass(frozen=True)
class CoefficientData:
    """Derived integers attached to an admissible ``(k, l, m, r)``."""

    k: int
    l: int
    m: int
    r: int
    lam: ParityType
    M: int
    b: int
    c: int
    n: int

    def to_json(self) -> dict:
        return {"k": self.k, "l": self.l, "m": self.m, "r": self.r,
                "lambda": list(self.lam.triple), "M": self.M, "b": self.b, "c": self.c,
                "n": self.n}


def balanced(k: int, l: int, m: int) -> bool:
    return k >= l >= m >= 1 and k < l + m


def r_range(k: int, l: int, m: int) -> range:
    lam = ParityType.of_weights(k, l, m)
    low = k - (l + m + lam.lam1) // 2
    high = (l + m - lam.lam1) // 2 - 2
    return range(low, high + 1)


def coefficient_data(k: int, l: int, m: int, r: int) -> CoefficientData:
    if not balanced(k, l, m):
        raise DomainError(f"({k}, {l}, {m}) is not an ordered balanced triple")
    lam = ParityType.of_weights(k, l, m)
    if r not in r_range(k, l, m):
        raise DomainError(f"r = {r} outside the admissible range for ({k}, {l}, {m})")
    M = k - r - 2
    b = (k - l - lam.lam2) // 2
    c = (k - m - lam.lam3) // 2
    n = M + (l + m - lam.lam1) // 2
    return CoefficientData(k, l, m, r, lam, M, b, c, n)


def admissible_tuples(max_k: int):
    """Every ``(k, l, m, r)`` with k <= max_k in the admissible range."""
    for k in range(1, max_k + 1):
        for l in range(1, k + 1):
            for m in range(1, l + 1):
                if balanced(k, l, m):
                    for r in r_range(k, l, m):
                        yield k, l, m, r


def w_coefficient(k: int, l: int, m: int, r: int) -> GammaValue:
    """Closed form of ``w_{0,b,c}``."""
    d = coefficient_data(k, l, m, r)
    l1, l2 = d.lam.lam1, d.lam.lam2
    M, b, c = d.M, d.b, d.c
    q = (Fraction(4) ** (3 * M - b - c - 2 * l1 - l2)
         * Fraction(2) ** (M + l1 + 2 * l2 - b - c)
         * Fraction(factorial(2 * M + l1) * factorial(M),
                    factorial(2 * M) * factorial(M - l1 - l2 - b - c))
         * Fraction(factorial(r - l2), factorial(b) * factorial(c) * factorial(r - l2 - b - c)))
    return GammaValue(q, 3 * M - b - c - 2 * l1 - l2, l1 - l2)


def binomial_sum(r1: int, b: int, c: int) -> int:
    """``sum_i C(r1,i) C(r1-i,b-i) C(r1-i,c-i) (-1)^i`` over 0 <= i <= min(b, c)."""
    return sum(comb(r1, i) * comb(r1 - i, b - i) * comb(r1 - i, c - i) * (-1) ** i
               for i in range(min(b, c) + 1))


def binomial_closed_form(r1: int, b: int, c: int) -> Fraction:
    return Fraction(factorial(r1), factorial(b) * factorial(c) * factorial(r1 - b - c))


def binomial_identity_holds(r1: int, b: int, c: int) -> bool:
    """Check the summation identity and its intermediate single-binomial form."""
    if min(r1, b, c) < 0 or b + c > r1:
        raise DomainError("need b, c >= 0 and b + c <= r1")
    lhs = binomial_sum(r1, b, c)
    middle_sum = sum(comb(b, i) * comb(r1 - i, r1 - c) * (-1) ** i for i in range(b + 1))
    middle = Fraction(factorial(r1), factorial(r1 - b) * factorial(b)) * middle_sum
    return lhs == middle == binomial_closed_form(r1, b, c)


@dataclass(frozen=True)
class CrossCheck:
    data: CoefficientData
    extracted: SymPoly
    expected: SymPoly
    laurent_shape: bool

    @property
    def holds(self) -> bool:
        return self.laurent_shape and self.extracted == self.expected

    def to_json(self) -> dict:
        return {**self.data.to_json(), "extracted": str(self.extracted.to_sympy()),
                "expected": str(self.expected.to_sympy()),
                "laurent_shape": self.laurent_shape, "holds": self.holds}


def whittaker_polynomial(k: int, l: int, m: int, r: int) -> tuple:
    """``D_lambda omega*`` at ``T = A B A`` for B with zero diagonal, plus its z-shift.

    B has off-diagonal entries ``b1 = B23, b2 = B13, b3 = B12`` and
    ``A = diag(z1, z2, z3)`` with ``z_i^2 = y_i``.  Returns the polynomial
    and the exponent shift of z coming from the power of ``y1 y2 y3`` and
    the square-root factors in front of omega.
    """
    d = coefficient_data(k, l, m, r)
    l1, l2 = d.lam.lam1, d.lam.lam2
    omega = omega_star(d.M + 2, l2 - r)
    derived = apply_D_lambda(omega, d.lam)
    weights = {(2, 3): GENS["b1"], (1, 3): GENS["b2"], (1, 2): GENS["b3"]}
    poly = substitute_zero_diagonal(derived, weights)
    shift = (-2 * d.M + l1, -2 * d.M + l1 + l2, -2 * d.M + 2 * l1 + l2)
    return poly, shift


def extract_q_coefficient(k: int, l: int, m: int, r: int) -> tuple:
    """``Q_{0,b,c}`` read off the symbolic expansion in ``y_i^{-1}``.

    Also reports whether every term has even z-exponents in ``[-2M, 0]``,
    i.e. the expansion is a polynomial in ``y_i^{-1}`` of degree at most M.
    """
    d = coefficient_data(k, l, m, r)
    poly, shift = whittaker_polynomial(k, l, m, r)
    zi = [INDEX["z1"], INDEX["z2"], INDEX["z3"]]
    target = (0, -2 * d.b, -2 * d.c)
    shape = True
    picked = {}
    for mon, coeff in poly.poly.items():
        exps = tuple(mon[z] + s for z, s in zip(zi, shift))
        if any(e % 2 or e > 0 or e < -2 * d.M for e in exps):
            shape = False
        if exps == target:
            mon = list(mon)
            for z in zi:
                mon[z] = 0
            picked[tuple(mon)] = coeff
    return SymPoly(RING(picked), poly.scale), shape


def w_coefficient_cross_check(k: int, l: int, m: int, r: int) -> CrossCheck:
    d = coefficient_data(k, l, m, r)
    extracted, shape = extract_q_coefficient(k, l, m, r)
    b1, b2, b3 = GENS["b1"], GENS["b2"], GENS["b3"]
    monomial = b1 ** (d.n - k) * b2 ** (d.n - l) * b3 ** (d.n - m)
    expected = SymPoly(monomial) * w_coefficient(k, l, m, r)
    return CrossCheck(d, extracted, expected, shape)


# --- constants in the holomorphic-projection bookkeeping ---------------------

def power_of_two_identity(k: int, l: int, m: int, r: int) -> bool:
    """The 2-adic exponent count balancing C_1, b! c!, (4 pi)^(-b-c), 2^(-3n+k+l+m) and w."""
    d = coefficient_data(k, l, m, r)
    l1, l2 = d.lam.lam1, d.lam.lam2
    M, b, c, n = d.M, d.b, d.c, d.n
    lhs = (3 * (3 + 2 * r - k - l2) + (2 * (k - r) - 3) - 2 * b - 2 * c + (k + l + m - 3 * n)
           + (7 * M - 3 * b - 3 * c - 3 * l1))
    return lhs == -2 - k + 2 * (l + m) + l1 + 2 * l2


def power_of_pi_identity(k: int, l: int, m: int, r: int) -> bool:
    d = coefficient_data(k, l, m, r)
    l1, l2 = d.lam.lam1, d.lam.lam2
    lhs = (6 - 2) - d.b - d.c + (3 * d.M - d.b - d.c - 2 * l1 - l2)
    return lhs == -3 * r + k + l + m + l2 - l1 - 2
