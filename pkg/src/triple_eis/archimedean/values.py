"""Exact archimedean value domains.

``GammaValue`` is a number ``rational * pi**e * i**m`` with e a half-integer.
``SymPoly`` is a polynomial over Q in a fixed ring of formal variables, times
a ``GammaValue`` scale; the variable ``Pi`` stands for pi inside the
polynomial so that sums with different pi-powers stay exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import sympy
from sympy import QQ
from sympy.polys.rings import ring

from ..errors import DomainError, UnsupportedError

# Entries of T and u are named by their (row, column) with row <= column.
MATRIX_INDICES = ((1, 1), (2, 2), (3, 3), (2, 3), (1, 3), (1, 2))
_T_NAMES = [f"T{i}{j}" for i, j in MATRIX_INDICES]
_U_NAMES = [f"u{i}{j}" for i, j in MATRIX_INDICES]
VARIABLE_NAMES = tuple(_T_NAMES + _U_NAMES + ["s", "Pi", "z1", "z2", "z3", "b1", "b2", "b3", "y"])

RING, *_GENS = ring(",".join(VARIABLE_NAMES), QQ)
GENS = dict(zip(VARIABLE_NAMES, _GENS))
INDEX = {name: k for k, name in enumerate(VARIABLE_NAMES)}


def gen(name: str):
    return GENS[name]


def entry_name(prefix: str, i: int, j: int) -> str:
    i, j = min(i, j), max(i, j)
    return f"{prefix}{i}{j}"


def symmetric_matrix(prefix: str):
    """3x3 symmetric matrix of ring generators ``T`` or ``u``."""
    return [[GENS[entry_name(prefix, i, j)] for j in (1, 2, 3)] for i in (1, 2, 3)]


def det3(a):
    return (a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]))


def _half_integer(x) -> Fraction:
    x = Fraction(x)
    if (2 * x).denominator != 1:
        raise DomainError(f"{x} is not a half-integer")
    return x


@dataclass(frozen=True)
class GammaValue:
    """``rational * pi**pi_exponent * i**i_exponent`` in canonical form.

    The i-exponent is reduced to 0 or 1 by moving i**2 = -1 into the sign;
    zero is stored with both exponents 0.
    """

    rational: Fraction
    pi_exponent: Fraction = Fraction(0)
    i_exponent: int = 0

    def __post_init__(self):
        q = Fraction(self.rational)
        e = _half_integer(self.pi_exponent)
        m = self.i_exponent % 4
        if m >= 2:
            q, m = -q, m - 2
        if q == 0:
            e, m = Fraction(0), 0
        object.__setattr__(self, "rational", q)
        object.__setattr__(self, "pi_exponent", e)
        object.__setattr__(self, "i_exponent", m)

    @classmethod
    def one(cls) -> "GammaValue":
        return cls(Fraction(1))

    @classmethod
    def pi(cls, exponent=1) -> "GammaValue":
        return cls(Fraction(1), Fraction(exponent))

    @classmethod
    def imaginary_unit(cls, exponent: int = 1) -> "GammaValue":
        return cls(Fraction(1), Fraction(0), exponent)

    @classmethod
    def gamma(cls, x) -> "GammaValue":
        """Gamma at a positive integer or half-integer."""
        x = _half_integer(x)
        if x <= 0:
            raise DomainError(f"Gamma({x}) is a pole")
        if x.denominator == 1:
            return cls(Fraction(factorial(int(x) - 1)))
        n = int(x - Fraction(1, 2))
        return cls(Fraction(factorial(2 * n), 4 ** n * factorial(n)), Fraction(1, 2))

    @classmethod
    def gamma_c(cls, x) -> "GammaValue":
        """``Gamma_C(x) = 2 (2 pi)**-x Gamma(x)`` at a positive integer."""
        x = Fraction(x)
        if x.denominator != 1:
            raise DomainError("Gamma_C is evaluated at integers here")
        return cls(Fraction(2) * Fraction(2) ** -int(x), -x) * cls.gamma(x)

    @classmethod
    def gamma_m(cls, m: int, x) -> "GammaValue":
        """``Gamma_m(x) = pi**(m(m-1)/4) prod_{j<m} Gamma(x - j/2)``."""
        out = cls.pi(Fraction(m * (m - 1), 4))
        for j in range(m):
            out = out * cls.gamma(Fraction(x) - Fraction(j, 2))
        return out

    def is_zero(self) -> bool:
        return self.rational == 0

    def __mul__(self, other) -> "GammaValue":
        if not isinstance(other, GammaValue):
            other = GammaValue(Fraction(other))
        return GammaValue(self.rational * other.rational, self.pi_exponent + other.pi_exponent,
                          self.i_exponent + other.i_exponent)

    __rmul__ = __mul__

    def inverse(self) -> "GammaValue":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return GammaValue(1 / self.rational, -self.pi_exponent, -self.i_exponent)

    def __truediv__(self, other) -> "GammaValue":
        if not isinstance(other, GammaValue):
            other = GammaValue(Fraction(other))
        return self * other.inverse()

    def __rtruediv__(self, other) -> "GammaValue":
        return GammaValue(Fraction(other)) * self.inverse()

    def __neg__(self) -> "GammaValue":
        return GammaValue(-self.rational, self.pi_exponent, self.i_exponent)

    def __pow__(self, n: int) -> "GammaValue":
        if n < 0:
            return self.inverse() ** (-n)
        return GammaValue(self.rational ** n, self.pi_exponent * n, self.i_exponent * n)

    def to_sympy(self):
        return (sympy.Rational(self.rational.numerator, self.rational.denominator)
                * sympy.pi ** sympy.Rational(self.pi_exponent.numerator, self.pi_exponent.denominator)
                * sympy.I ** self.i_exponent)

    def to_json(self) -> dict:
        return {"rational": str(self.rational), "pi_exponent": str(self.pi_exponent),
                "i_exponent": self.i_exponent}

    @classmethod
    def from_json(cls, data: dict) -> "GammaValue":
        return cls(Fraction(data["rational"]), Fraction(data["pi_exponent"]), int(data["i_exponent"]))

    def __str__(self) -> str:
        return str(self.to_sympy())


ONE = GammaValue.one()
PARITY_TYPES = ((0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 2))


@dataclass(frozen=True)
class ParityType:
    lam1: int
    lam2: int

    def __post_init__(self):
        if self.lam1 not in (0, 1) or self.lam2 not in (0, 1):
            raise DomainError("parity type entries are 0 or 1")

    @property
    def lam3(self) -> int:
        return self.lam1 + self.lam2

    @property
    def triple(self) -> tuple:
        return (self.lam1, self.lam2, self.lam3)

    @classmethod
    def parse(cls, value) -> "ParityType":
        if isinstance(value, ParityType):
            return value
        if isinstance(value, str):
            value = [int(x) for x in value.split(",")]
        value = tuple(value)
        if value not in PARITY_TYPES:
            raise DomainError(f"{value} is not a parity type")
        return cls(value[0], value[1])

    @classmethod
    def of_weights(cls, k: int, l: int, m: int) -> "ParityType":
        """Parity type of a weight triple ordered as k >= l >= m."""
        if not k >= l >= m >= 1:
            raise DomainError("weights must satisfy k >= l >= m >= 1")
        return cls((l - m) % 2, (k - l) % 2)

    @classmethod
    def all(cls):
        return [cls(a, b) for a, b, _ in PARITY_TYPES]


class SymPoly:
    """``scale * poly`` with poly in ``RING`` and scale a ``GammaValue``.

    Canonical form: the rational part of the scale is 1 and the lowest power
    of ``Pi`` present in ``poly`` is 0, so equality is structural.
    """

    __slots__ = ("poly", "scale")
    _PI = INDEX["Pi"]

    def __init__(self, poly, scale: GammaValue = ONE):
        poly = RING(poly)
        if not poly:
            self.poly, self.scale = RING.zero, ONE
            return
        shift = min(monom[self._PI] for monom in poly.keys())
        if shift:
            poly = RING({_shift_pi(monom, -shift): c for monom, c in poly.items()})
        if scale.rational != 1:
            poly = poly * QQ(scale.rational.numerator, scale.rational.denominator)
        self.poly = poly
        self.scale = GammaValue(Fraction(1), scale.pi_exponent + shift, scale.i_exponent)

    @classmethod
    def constant(cls, value) -> "SymPoly":
        if isinstance(value, GammaValue):
            return cls(RING.one, value)
        return cls(RING(QQ(Fraction(value).numerator, Fraction(value).denominator)))

    def is_zero(self) -> bool:
        return not self.poly

    def _aligned(self, other: "SymPoly"):
        """Both polynomials over a common scale."""
        if self.is_zero():
            return RING.zero, other.poly, other.scale
        if other.is_zero():
            return self.poly, RING.zero, self.scale
        if self.scale.i_exponent != other.scale.i_exponent:
            raise UnsupportedError("sum of real and imaginary parts is not represented")
        diff = other.scale.pi_exponent - self.scale.pi_exponent
        if diff.denominator != 1:
            raise UnsupportedError("sum with pi-exponents differing by a half-integer")
        pi = GENS["Pi"]
        if diff >= 0:
            return self.poly, other.poly * pi ** int(diff), self.scale
        return self.poly * pi ** int(-diff), other.poly, other.scale

    def __add__(self, other) -> "SymPoly":
        if not isinstance(other, SymPoly):
            other = SymPoly.constant(other)
        a, b, scale = self._aligned(other)
        return SymPoly(a + b, scale)

    __radd__ = __add__

    def __neg__(self) -> "SymPoly":
        return SymPoly(-self.poly, self.scale)

    def __sub__(self, other) -> "SymPoly":
        if not isinstance(other, SymPoly):
            other = SymPoly.constant(other)
        return self + (-other)

    def __mul__(self, other) -> "SymPoly":
        if isinstance(other, SymPoly):
            return SymPoly(self.poly * other.poly, self.scale * other.scale)
        if isinstance(other, GammaValue):
            return SymPoly(self.poly, self.scale * other)
        other = Fraction(other)
        return SymPoly(self.poly * QQ(other.numerator, other.denominator), self.scale)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "SymPoly":
        return SymPoly(self.poly ** n, self.scale ** n)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymPoly):
            other = SymPoly.constant(other)
        return self.poly == other.poly and self.scale == other.scale

    __hash__ = None

    def terms(self):
        """``(exponent dict, Fraction)`` pairs of the polynomial part."""
        for monom, c in self.poly.items():
            yield {VARIABLE_NAMES[k]: e for k, e in enumerate(monom) if e}, Fraction(int(c.numerator), int(c.denominator))

    def degree_in(self, names) -> int:
        """Largest total degree in the listed variables (-1 for zero)."""
        idx = [INDEX[n] for n in names]
        return max((sum(m[k] for k in idx) for m in self.poly.keys()), default=-1)

    def to_sympy(self):
        symbols = sympy.symbols(VARIABLE_NAMES)
        expr = self.poly.as_expr(*symbols).subs(symbols[INDEX["Pi"]], sympy.pi)
        return sympy.expand(expr * self.scale.to_sympy())

    def to_json(self) -> dict:
        terms = []
        for monom, c in sorted(self.poly.items()):
            terms.append([{VARIABLE_NAMES[k]: e for k, e in enumerate(monom) if e}, str(c)])
        return {"scale": self.scale.to_json(), "terms": terms}

    @classmethod
    def from_json(cls, data: dict) -> "SymPoly":
        poly = RING.zero
        for exps, c in data["terms"]:
            monom = [0] * len(VARIABLE_NAMES)
            for name, e in exps.items():
                monom[INDEX[name]] = int(e)
            c = Fraction(c)
            poly += RING({tuple(monom): QQ(c.numerator, c.denominator)})
        return cls(poly, GammaValue.from_json(data["scale"]))

    def __repr__(self) -> str:
        return f"SymPoly({self.to_sympy()})"


def _shift_pi(monom, shift):
    monom = list(monom)
    monom[INDEX["Pi"]] += shift
    return tuple(monom)


def rational_to_qq(x):
    x = Fraction(x)
    return QQ(x.numerator, x.denominator)
