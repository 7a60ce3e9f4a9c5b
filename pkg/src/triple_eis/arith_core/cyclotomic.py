"""Arithmetic in cyclotomic quotient rings Q[x]/(Phi_m(x)).

Coefficients may be ``Fraction`` or ``PadicNumber``; only ring operations and
comparison with zero are needed from them.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd

from ..errors import DomainError


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_exact_div(num, den):
    """Quotient of integer polynomials (lowest degree first), den monic."""
    num = list(num)
    dn = len(den) - 1
    quotient = [0] * (len(num) - dn)
    for i in range(len(num) - 1, dn - 1, -1):
        c = num[i]
        quotient[i - dn] = c
        if c:
            for j, d in enumerate(den):
                num[i - dn + j] -= c * d
    if any(num[:dn]):
        raise ArithmeticError("inexact polynomial division")
    return quotient


@lru_cache(maxsize=None)
def cyclotomic_polynomial(m: int) -> tuple:
    """Integer coefficients of Phi_m, lowest degree first."""
    if m < 1:
        raise DomainError("conductor must be positive")
    poly = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            poly = _poly_exact_div(poly, cyclotomic_polynomial(d))
    return tuple(poly)


def euler_phi(m: int) -> int:
    return len(cyclotomic_polynomial(m)) - 1


def _reduce(coeffs, m):
    """Reduce a dense coefficient list modulo Phi_m using its sparse support."""
    phi = cyclotomic_polynomial(m)
    deg = len(phi) - 1
    support = [(j, c) for j, c in enumerate(phi[:-1]) if c]
    coeffs = list(coeffs)
    for i in range(len(coeffs) - 1, deg - 1, -1):
        c = coeffs[i]
        if c:
            base = i - deg
            for j, d in support:
                coeffs[base + j] -= c * d
            coeffs[i] = 0
    out = coeffs[:deg]
    out += [0] * (deg - len(out))
    return out


class CyclotomicElement:
    """Element of Q(zeta_m) in the power basis 1, zeta, ..., zeta^(phi(m)-1)."""

    __slots__ = ("m", "coeffs")

    def __init__(self, m: int, coeffs):
        self.m = m
        self.coeffs = tuple(_reduce(coeffs, m))

    @classmethod
    def from_exponent_counts(cls, m: int, counts) -> "CyclotomicElement":
        """Sum of ``counts[r] * zeta_m**r`` for r in range(len(counts))."""
        dense = [0] * m
        for r, c in enumerate(counts):
            if c:
                dense[r % m] += c
        return cls(m, dense)

    @classmethod
    def zeta_power(cls, m: int, e: int, scale=1) -> "CyclotomicElement":
        dense = [0] * m
        dense[e % m] = scale
        return cls(m, dense)

    @classmethod
    def rational(cls, m: int, value) -> "CyclotomicElement":
        return cls(m, [value])

    def _check(self, other):
        if isinstance(other, CyclotomicElement):
            if other.m != self.m:
                raise DomainError("conductors differ; lift to a common conductor first")
            return other
        return CyclotomicElement(self.m, [other])

    def __add__(self, other):
        other = self._check(other)
        return CyclotomicElement(self.m, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicElement(self.m, [-a for a in self.coeffs])

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        if not isinstance(other, CyclotomicElement):
            return CyclotomicElement(self.m, [a * other for a in self.coeffs])
        other = self._check(other)
        return CyclotomicElement(self.m, _poly_mul(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise DomainError("negative powers are not supported")
        result = CyclotomicElement(self.m, [1])
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def lift(self, multiple: int) -> "CyclotomicElement":
        """Image under Q(zeta_m) -> Q(zeta_M), zeta_m -> zeta_M**(M/m)."""
        if multiple % self.m:
            raise DomainError("target conductor must be a multiple")
        step = multiple // self.m
        dense = [0] * (step * len(self.coeffs))
        for i, c in enumerate(self.coeffs):
            dense[i * step] = c
        return CyclotomicElement(multiple, dense)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def rational_value(self):
        """The scalar value if the element lies in the base field, else None."""
        if all(c == 0 for c in self.coeffs[1:]):
            return self.coeffs[0] if self.coeffs else 0
        return None

    def galois_conjugate(self, a: int) -> "CyclotomicElement":
        """Apply zeta -> zeta**a for a unit a modulo m."""
        if gcd(a, self.m) != 1:
            raise DomainError("not a Galois automorphism")
        dense = [0] * self.m
        for i, c in enumerate(self.coeffs):
            dense[i * a % self.m] += c
        return CyclotomicElement(self.m, dense)

    def __eq__(self, other):
        try:
            other = self._check(other)
        except DomainError:
            return False
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        terms = [f"{c}*z^{i}" for i, c in enumerate(self.coeffs) if c != 0]
        return f"CyclotomicElement(m={self.m}: {' + '.join(terms) or '0'})"


def ramanujan_sum(m: int, r: int) -> int:
    """c_m(r): the sum of zeta_m**(a*r) over units a modulo m (an integer)."""
    total = 0
    # c_m(r) = sum over d | gcd(m, r) of mu(m/d) * d
    g = gcd(m, r) if r else m
    for d in range(1, g + 1):
        if g % d == 0:
            total += _mobius(m // d) * d
    return total


def _mobius(n: int) -> int:
    result = 1
    q = 2
    while q * q <= n:
        if n % q == 0:
            n //= q
            if n % q == 0:
                return 0
            result = -result
        q += 1
    if n > 1:
        result = -result
    return result


def rational_orbit_value(m: int, counts) -> Fraction:
    """Value of sum counts[r]*zeta_m**r assuming it is rational.

    Averages over the Galois group, which turns each root of unity into a
    Ramanujan sum.  Used as an independent check of ``rational_value``.
    """
    phi = euler_phi(m)
    total = Fraction(0)
    for r, c in enumerate(counts):
        if c:
            total += Fraction(c * ramanujan_sum(m, r % m), phi)
    return total
