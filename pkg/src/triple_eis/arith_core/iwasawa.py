"""Truncated power series in the four Iwasawa variables X1, X2, X3, T.

Two representations are provided:

``IwasawaSeries``
    the coefficient table of a power series, truncated at per-variable caps,
    with coefficients in Z_p known modulo ``p**prec``;

``GroupLikeSum``
    a finite Z_p-linear combination of group-like elements
    ``(1+X1)**s1 (1+X2)**s2 (1+X3)**s3 (1+T)**sT`` with exponents in Z_p.
    Every coefficient the family module produces is of this shape, and its
    specializations are exact, whereas a truncated table only determines a
    specialization modulo ``p**(cap+1)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

from ..errors import DomainError, UnsupportedError
from .padic import DEFAULT_PRECISION, PadicNumber, _log_one_plus, teichmuller_int

VARIABLES = ("X1", "X2", "X3", "T")
DEFAULT_CAPS = (4, 4, 4, 4)
# extra p-adic digits kept on group-like exponents so that binomial
# coefficients binom(s, n) stay accurate after dividing by n!
EXPONENT_GUARD = 4

Exponents = Tuple[int, int, int, int]


@dataclass(frozen=True)
class ArithmeticPoint:
    """A point (k1, k2, k3, kP) with trivial finite-order parts."""

    weights: Tuple[int, int, int]
    kP: int
    finite_parts: Optional[tuple] = field(default=None)

    def __post_init__(self):
        if len(self.weights) != 3:
            raise DomainError("three weights expected")
        if self.finite_parts:
            raise UnsupportedError("only trivial finite-order characters are implemented")

    @property
    def exponents(self) -> Exponents:
        return (*self.weights, self.kP)

    def is_balanced(self) -> bool:
        return sum(self.weights) > 2 * max(self.weights)

    def is_critical(self) -> bool:
        top = max(self.weights)
        return top <= self.kP <= sum(self.weights) - top - 2

    @classmethod
    def parse(cls, text: str) -> "ArithmeticPoint":
        try:
            k1, k2, k3, kP = (int(x) for x in text.split(","))
        except ValueError as exc:
            raise DomainError(f"expected k1,k2,k3,kP, got {text!r}") from exc
        return cls((k1, k2, k3), kP)


def generator(p: int) -> int:
    """The fixed topological generator u = 1 + p of 1 + pZ_p."""
    return 1 + p


def one_unit_part(z: int, p: int, prec: int) -> int:
    """<z> = z * omega(z)**-1 modulo p**prec, for an integer unit z."""
    if z % p == 0:
        raise DomainError(f"{z} is not a {p}-adic unit")
    modulus = p ** prec
    omega = teichmuller_int(z, p, prec)
    return z * pow(omega, -1, modulus) % modulus


def diamond_exponent(z: int, p: int, prec: int = DEFAULT_PRECISION) -> int:
    """The exponent log_p<z> / log_p(u) in Z_p, modulo ``p**prec``.

    Both logarithms have valuation at least 1, so they are computed one digit
    deeper than the requested precision.
    """
    work = prec + 2
    log_z = _log_one_plus(one_unit_part(z, p, work) - 1, p, work)
    log_u = _log_one_plus(p, p, work)
    # log_u = p * unit; log_z is divisible by p
    unit_u = (log_u // p) % p ** (work - 1)
    ratio = (log_z // p) * pow(unit_u, -1, p ** (work - 1))
    return ratio % p ** prec


def _binomial_mod(s: int, n: int, p: int, prec: int) -> int:
    """binom(s, n) modulo p**prec for a p-adic integer represented by s >= 0."""
    num = 1
    den = 1
    for i in range(n):
        num *= s - i
        den *= i + 1
    return (num // den) % p ** prec


class IwasawaSeries:
    """Truncated four-variable power series over Z_p / p^prec."""

    __slots__ = ("p", "caps", "prec", "coeffs")

    def __init__(self, p: int, caps=DEFAULT_CAPS, prec: int = DEFAULT_PRECISION,
                 coeffs: Optional[Dict[Exponents, int]] = None):
        caps = tuple(int(c) for c in caps)
        if len(caps) != 4 or min(caps) < 0:
            raise DomainError(f"bad caps {caps}")
        self.p = p
        self.caps = caps
        self.prec = prec
        modulus = p ** prec
        table = {}
        for exps, c in (coeffs or {}).items():
            if all(e <= cap for e, cap in zip(exps, caps)):
                c %= modulus
                if c:
                    table[tuple(exps)] = c
        self.coeffs = table

    # constructors -----------------------------------------------------

    @classmethod
    def constant(cls, value: int, p: int, caps=DEFAULT_CAPS, prec=DEFAULT_PRECISION):
        return cls(p, caps, prec, {(0, 0, 0, 0): value})

    @classmethod
    def variable(cls, name: str, p: int, caps=DEFAULT_CAPS, prec=DEFAULT_PRECISION):
        idx = VARIABLES.index(name)
        exps = [0, 0, 0, 0]
        exps[idx] = 1
        return cls(p, caps, prec, {tuple(exps): 1})

    def _compatible(self, other: "IwasawaSeries"):
        if other.p != self.p:
            raise DomainError("different primes")
        return tuple(min(a, b) for a, b in zip(self.caps, other.caps)), min(self.prec, other.prec)

    # ring operations --------------------------------------------------

    def __add__(self, other):
        if isinstance(other, int):
            other = IwasawaSeries.constant(other, self.p, self.caps, self.prec)
        caps, prec = self._compatible(other)
        table = dict(self.coeffs)
        for exps, c in other.coeffs.items():
            table[exps] = table.get(exps, 0) + c
        return IwasawaSeries(self.p, caps, prec, table)

    __radd__ = __add__

    def __neg__(self):
        return IwasawaSeries(self.p, self.caps, self.prec, {e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return IwasawaSeries(self.p, self.caps, self.prec,
                                 {e: c * other for e, c in self.coeffs.items()})
        caps, prec = self._compatible(other)
        modulus = self.p ** prec
        table: Dict[Exponents, int] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                exps = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2], e1[3] + e2[3])
                if exps[0] <= caps[0] and exps[1] <= caps[1] and exps[2] <= caps[2] \
                        and exps[3] <= caps[3]:
                    table[exps] = (table.get(exps, 0) + c1 * c2) % modulus
        return IwasawaSeries(self.p, caps, prec, table)

    __rmul__ = __mul__

    def truncate(self, caps) -> "IwasawaSeries":
        caps = tuple(min(a, b) for a, b in zip(self.caps, caps))
        return IwasawaSeries(self.p, caps, self.prec, self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, IwasawaSeries):
            return NotImplemented
        caps, prec = self._compatible(other)
        a = self.truncate(caps).coeffs
        b = other.truncate(caps).coeffs
        modulus = self.p ** prec
        keys = set(a) | set(b)
        return all((a.get(k, 0) - b.get(k, 0)) % modulus == 0 for k in keys)

    __hash__ = None

    def coefficient(self, exps: Exponents) -> PadicNumber:
        return PadicNumber.from_rational(self.coeffs.get(tuple(exps), 0), self.p, self.prec)

    # specialization ---------------------------------------------------

    def specialization_precision(self, point: ArithmeticPoint) -> int:
        """Absolute precision to which the truncated table determines a value."""
        p = self.p
        u = generator(p)
        best = self.prec
        for k, cap in zip(point.exponents, self.caps):
            if k == 0:
                continue
            x = pow(u, k) - 1
            v = 0
            while x % p == 0:
                x //= p
                v += 1
            best = min(best, (cap + 1) * v)
        return best

    def specialize(self, point: ArithmeticPoint) -> PadicNumber:
        """Substitute X_i -> u**k_i - 1 and T -> u**kP - 1."""
        p = self.p
        modulus = p ** self.prec
        u = generator(p)
        values = [(pow(u, k, modulus) - 1) % modulus for k in point.exponents]
        powers = [[pow(x, e, modulus) for e in range(cap + 1)] for x, cap in zip(values, self.caps)]
        total = 0
        for (e1, e2, e3, eT), c in self.coeffs.items():
            total += c * powers[0][e1] * powers[1][e2] * powers[2][e3] * powers[3][eT]
        return PadicNumber.from_rational(total % modulus, p, self.specialization_precision(point))

    # serialization ----------------------------------------------------

    def to_json(self) -> dict:
        entries = [[list(e), PadicNumber.from_rational(c, self.p, self.prec).to_json()]
                   for e, c in sorted(self.coeffs.items())]
        return {"p": self.p, "caps": list(self.caps), "prec": self.prec, "entries": entries}

    @classmethod
    def from_json(cls, data: dict) -> "IwasawaSeries":
        try:
            p = int(data["p"])
            caps = tuple(int(c) for c in data["caps"])
            prec = int(data.get("prec", DEFAULT_PRECISION))
            table = {}
            for exps, coeff in data["entries"]:
                value = PadicNumber.from_json(coeff)
                table[tuple(int(e) for e in exps)] = value.to_int()
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed Iwasawa series: {exc}") from exc
        return cls(p, caps, prec, table)

    def __repr__(self):
        return f"IwasawaSeries(p={self.p}, caps={self.caps}, terms={len(self.coeffs)})"


class GroupLikeSum:
    """Finite sum of c * (1+X1)^s1 (1+X2)^s2 (1+X3)^s3 (1+T)^sT.

    Exponents and coefficients are integers modulo ``p**prec``.
    """

    __slots__ = ("p", "prec", "terms")

    def __init__(self, p: int, prec: int = DEFAULT_PRECISION,
                 terms: Optional[Dict[Exponents, int]] = None):
        self.p = p
        self.prec = prec
        modulus = p ** prec
        exp_modulus = p ** (prec + EXPONENT_GUARD)
        table: Dict[Exponents, int] = {}
        for exps, c in (terms or {}).items():
            key = tuple(e % exp_modulus for e in exps)
            table[key] = (table.get(key, 0) + c) % modulus
        self.terms = {k: c for k, c in table.items() if c}

    @classmethod
    def monomial(cls, p: int, prec: int, exps: Exponents, coeff: int = 1) -> "GroupLikeSum":
        return cls(p, prec, {tuple(exps): coeff})

    def __add__(self, other: "GroupLikeSum"):
        table = dict(self.terms)
        for k, c in other.terms.items():
            table[k] = table.get(k, 0) + c
        return GroupLikeSum(self.p, min(self.prec, other.prec), table)

    def __mul__(self, other):
        if isinstance(other, int):
            return GroupLikeSum(self.p, self.prec, {k: c * other for k, c in self.terms.items()})
        table: Dict[Exponents, int] = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                key = (k1[0] + k2[0], k1[1] + k2[1], k1[2] + k2[2], k1[3] + k2[3])
                table[key] = table.get(key, 0) + c1 * c2
        return GroupLikeSum(self.p, min(self.prec, other.prec), table)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not self.terms

    def specialize(self, point: ArithmeticPoint) -> PadicNumber:
        """Exact value at X_i -> u**k_i - 1, T -> u**kP - 1, modulo p**prec."""
        p = self.p
        modulus = p ** self.prec
        u = generator(p)
        ks = point.exponents
        total = 0
        for exps, c in self.terms.items():
            total += c * pow(u, sum(k * s for k, s in zip(ks, exps)), modulus)
        return PadicNumber.from_rational(total % modulus, p, self.prec)

    def to_series(self, caps=DEFAULT_CAPS) -> IwasawaSeries:
        """Expand every group-like term as a product of binomial series."""
        p = self.p
        modulus = p ** self.prec
        caps = tuple(caps)
        table: Dict[Exponents, int] = {}
        for exps, c in self.terms.items():
            rows = [[_binomial_mod(s, n, p, self.prec) for n in range(cap + 1)]
                    for s, cap in zip(exps, caps)]
            for e1, b1 in enumerate(rows[0]):
                c1 = c * b1 % modulus
                for e2, b2 in enumerate(rows[1]):
                    c2 = c1 * b2 % modulus
                    for e3, b3 in enumerate(rows[2]):
                        c3 = c2 * b3 % modulus
                        for eT, bT in enumerate(rows[3]):
                            key = (e1, e2, e3, eT)
                            table[key] = table.get(key, 0) + c3 * bT
        return IwasawaSeries(p, caps, self.prec, table)

    def to_json(self) -> dict:
        return {"p": self.p, "prec": self.prec,
                "terms": [[[str(e) for e in k], str(c)] for k, c in sorted(self.terms.items())]}

    @classmethod
    def from_json(cls, data: dict) -> "GroupLikeSum":
        try:
            terms = {tuple(int(e) for e in k): int(c) for k, c in data["terms"]}
            return cls(int(data["p"]), int(data["prec"]), terms)
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed group-like sum: {exc}") from exc

    def __repr__(self):
        return f"GroupLikeSum(p={self.p}, terms={len(self.terms)})"


def diamond_bracket(z: int, variable: str, p: int, caps=DEFAULT_CAPS,
                    prec: int = DEFAULT_PRECISION) -> IwasawaSeries:
    """<z>_variable = (1 + variable) ** (log_p<z> / log_p u), truncated."""
    if variable not in VARIABLES:
        raise DomainError(f"unknown variable {variable!r}")
    idx = VARIABLES.index(variable)
    s = diamond_exponent(z, p, prec + EXPONENT_GUARD)
    exps = [0, 0, 0, 0]
    exps[idx] = s
    return GroupLikeSum(p, prec, {tuple(exps): 1}).to_series(caps)


def series_specialize(f, point: ArithmeticPoint) -> PadicNumber:
    """Specialize either representation at an arithmetic point."""
    return f.specialize(point)
