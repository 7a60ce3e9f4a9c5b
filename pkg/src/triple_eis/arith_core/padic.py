"""Fixed-precision p-adic numbers.

A nonzero value is ``p**val * unit`` where ``unit`` is an integer coprime to
``p`` known modulo ``p**prec``.  Zero is stored with ``unit == 0``,
``prec == 0`` and ``val`` equal to the absolute precision to which the value
is known to vanish.  Equality is equality at the smaller absolute precision
of the two operands.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Integral, Rational

from ..errors import DomainError, PrecisionError

DEFAULT_PRECISION = 30


def valuation(x, p: int) -> int:
    """Exact p-adic valuation of a nonzero integer or rational."""
    x = Fraction(x)
    if x == 0:
        raise DomainError("valuation of zero")
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


class PadicNumber:
    __slots__ = ("p", "val", "unit", "prec")

    def __init__(self, p: int, val: int, unit: int, prec: int):
        if p < 2:
            raise DomainError(f"not a prime: {p}")
        if prec < 0:
            raise DomainError("negative precision")
        self.p = p
        if prec == 0 or unit % p ** prec == 0:
            # exact zero flag; val carries the absolute precision
            self.val = val + prec if prec else val
            self.unit = 0
            self.prec = 0
            return
        modulus = p ** prec
        unit %= modulus
        if unit % p == 0:
            raise DomainError("unit part divisible by p")
        self.val = val
        self.unit = unit
        self.prec = prec

    # construction -----------------------------------------------------

    @classmethod
    def from_rational(cls, x, p: int, prec: int = DEFAULT_PRECISION) -> "PadicNumber":
        """Embed an exact rational, known to absolute precision ``prec``."""
        x = Fraction(x)
        if x == 0:
            return cls.zero(p, prec)
        v = valuation(x, p)
        if v >= prec:
            return cls.zero(p, prec)
        rel = prec - v
        modulus = p ** rel
        num = x.numerator
        den = x.denominator
        if v > 0:
            num //= p ** v
        elif v < 0:
            den //= p ** (-v)
        unit = num * pow(den, -1, modulus) % modulus
        return cls(p, v, unit, rel)

    @classmethod
    def zero(cls, p: int, prec: int = DEFAULT_PRECISION) -> "PadicNumber":
        return cls(p, prec, 0, 0)

    @classmethod
    def one(cls, p: int, prec: int = DEFAULT_PRECISION) -> "PadicNumber":
        return cls(p, 0, 1, prec)

    # basic queries ----------------------------------------------------

    @property
    def abs_prec(self) -> int:
        return self.val + self.prec

    def is_zero(self) -> bool:
        return self.unit == 0

    def is_unit(self) -> bool:
        return self.unit != 0 and self.val == 0

    def valuation(self) -> int:
        if self.is_zero():
            raise PrecisionError("valuation of an inexact zero is undetermined")
        return self.val

    def to_int(self) -> int:
        """Representative in ``[0, p**abs_prec)`` of a p-adic integer."""
        if self.val < 0:
            raise DomainError("value is not a p-adic integer")
        if self.is_zero():
            return 0
        return self.unit * self.p ** self.val % self.p ** self.abs_prec

    def to_fraction(self) -> Fraction:
        """The rational ``p**val * unit`` (one representative of the class)."""
        if self.is_zero():
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.p) ** self.val

    def residue(self, n: int) -> int:
        """Reduction modulo ``p**n`` of a p-adic integer."""
        if n > self.abs_prec:
            raise PrecisionError(f"value known only modulo p^{self.abs_prec}")
        return self.to_int() % self.p ** n

    def with_precision(self, abs_prec: int) -> "PadicNumber":
        """Forget digits beyond absolute precision ``abs_prec``."""
        if abs_prec > self.abs_prec:
            raise PrecisionError("cannot increase precision")
        if self.is_zero() or abs_prec <= self.val:
            return PadicNumber.zero(self.p, abs_prec)
        return PadicNumber(self.p, self.val, self.unit, abs_prec - self.val)

    # arithmetic -------------------------------------------------------

    def _coerce(self, other) -> "PadicNumber":
        if isinstance(other, PadicNumber):
            if other.p != self.p:
                raise DomainError("mixing different primes")
            return other
        if isinstance(other, int) and other % self.p:
            # p-adic unit integers need no valuation search
            return PadicNumber(self.p, 0, other, max(self.abs_prec, self.prec, 1))
        if isinstance(other, (Integral, Rational)):
            other = Fraction(other)
            if other == 0:
                return PadicNumber.zero(self.p, max(self.abs_prec, 0) + 1)
            v = valuation(other, self.p)
            return PadicNumber.from_rational(
                other, self.p, max(self.abs_prec, v + max(self.prec, 1)))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.p
        target = min(self.abs_prec, other.abs_prec)
        low = min(self.val, other.val)
        span = target - low
        if span <= 0:
            return PadicNumber.zero(p, target)
        total = (self.unit * p ** (self.val - low) + other.unit * p ** (other.val - low)) % p ** span
        if total == 0:
            return PadicNumber.zero(p, target)
        shift = 0
        while total % p == 0:
            total //= p
            shift += 1
        return PadicNumber(p, low + shift, total, span - shift)

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero():
            return self
        return PadicNumber(self.p, self.val, -self.unit, self.prec)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.p
        if self.is_zero() or other.is_zero():
            if self.is_zero() and other.is_zero():
                return PadicNumber.zero(p, self.val + other.val)
            z, nz = (self, other) if self.is_zero() else (other, self)
            return PadicNumber.zero(p, z.val + nz.val)
        rel = min(self.prec, other.prec)
        return PadicNumber(p, self.val + other.val, self.unit * other.unit, rel)

    __rmul__ = __mul__

    def inverse(self) -> "PadicNumber":
        if self.is_zero():
            raise ZeroDivisionError("inverse of an inexact zero")
        modulus = self.p ** self.prec
        return PadicNumber(self.p, -self.val, pow(self.unit, -1, modulus), self.prec)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            raise ZeroDivisionError("division by an inexact zero")
        if self.is_zero():
            return PadicNumber.zero(self.p, self.val - other.val)
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, exponent: int):
        if not isinstance(exponent, Integral):
            raise DomainError("only integer exponents are supported")
        exponent = int(exponent)
        if exponent < 0:
            return self.inverse() ** (-exponent)
        if exponent == 0:
            return PadicNumber.one(self.p, max(self.prec, 1))
        if self.is_zero():
            return PadicNumber.zero(self.p, self.val * exponent)
        modulus = self.p ** self.prec
        return PadicNumber(self.p, self.val * exponent, pow(self.unit, exponent, modulus), self.prec)

    # comparison -------------------------------------------------------

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return (self - other).is_zero()

    __hash__ = None

    def equal_mod(self, other, n: int) -> bool:
        """Equality modulo ``p**n``; raises if either side is less precise."""
        other = self._coerce(other)
        if min(self.abs_prec, other.abs_prec) < n:
            raise PrecisionError(f"cannot decide equality modulo p^{n}")
        diff = self - other
        return diff.is_zero() or diff.val >= n

    # serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {"p": self.p, "val": self.val, "unit": str(self.unit), "prec": self.prec}

    @classmethod
    def from_json(cls, data: dict) -> "PadicNumber":
        try:
            return cls(int(data["p"]), int(data["val"]), int(data["unit"]), int(data["prec"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed p-adic number: {data!r}") from exc

    def __repr__(self):
        if self.is_zero():
            return f"O({self.p}^{self.val})"
        return f"{self.unit}*{self.p}^{self.val} + O({self.p}^{self.abs_prec})"


def teichmuller(a: int, p: int, prec: int = DEFAULT_PRECISION) -> PadicNumber:
    """The (p-1)-st root of unity congruent to ``a`` modulo ``p``."""
    if a % p == 0:
        raise DomainError(f"{a} is not a unit modulo {p}")
    modulus = p ** prec
    x = a % modulus
    for _ in range(prec):
        x = pow(x, p, modulus)
    return PadicNumber(p, 0, x, prec)


def teichmuller_int(a: int, p: int, prec: int) -> int:
    """Integer representative of the Teichmuller lift modulo ``p**prec``."""
    return teichmuller(a, p, prec).to_int()


def _log_one_plus(y: int, p: int, prec: int) -> int:
    """log(1+y) modulo p**prec for an integer y divisible by p."""
    total = 0
    modulus = p ** prec
    # n - v_p(n) >= n/2, so terms with n >= 2*prec vanish modulo p**prec
    for n in range(1, 2 * prec + 1):
        e = 0
        m = n
        while m % p == 0:
            m //= p
            e += 1
        if n - e >= prec:
            continue
        term = pow(y, n, p ** (prec + e)) // p ** e
        term = term * pow(m, -1, modulus) % modulus
        total += term if n % 2 else -term
    return total % modulus


def padic_log(x: PadicNumber) -> PadicNumber:
    """p-adic logarithm on ``1 + pZ_p``.

    The result is known to the absolute precision of ``x``.
    """
    if x.is_zero() or x.val != 0 or x.unit % x.p != 1:
        raise DomainError("padic_log expects an element of 1 + pZ_p")
    p = x.p
    if x.prec == 0:
        raise PrecisionError("no digits available")
    value = _log_one_plus(x.unit - 1, p, x.prec)
    return PadicNumber.from_rational(value, p, x.prec)


def iwasawa_log(x: PadicNumber) -> PadicNumber:
    """Logarithm on all of Q_p^x with the normalization log(p) = 0."""
    if x.is_zero():
        raise DomainError("logarithm of zero")
    p = x.p
    unit = PadicNumber(p, 0, x.unit, x.prec)
    if unit.unit % p == 1:
        return padic_log(unit)
    return padic_log(unit ** (p - 1)) / (p - 1)
