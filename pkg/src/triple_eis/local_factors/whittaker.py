"""Degenerate Whittaker values of the p-adic section through exact Fourier transforms.

The section is built from a product Schwartz function on Sym_3(Q_p): each
diagonal coordinate carries the transform of 1_{pZ_p}, each off-diagonal
coordinate the transform of ``phi_mu = mu * 1_{Z_p^x}`` for a Teichmuller-power
character mu.  The Whittaker value at B is the transform of that product
evaluated at -B; off-diagonal coordinates pair with twice the entry of B
because tr(zB) counts them twice.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import lcm

from sympy import primitive_root

from ..arith_core.cyclotomic import CyclotomicElement
from ..arith_core.padic import valuation
from ..errors import DomainError


@lru_cache(maxsize=None)
def _discrete_logs(p: int):
    g = primitive_root(p)
    table, x = {}, 1
    for k in range(p - 1):
        table[x] = k
        x = x * g % p
    return table


def teichmuller_character_value(e: int, x, p: int, conductor: int) -> CyclotomicElement:
    """``omega^e(x)`` for a p-adic unit x, embedded via omega(g) -> zeta_{p-1}."""
    x = Fraction(x)
    if x == 0 or valuation(x, p) != 0:
        raise DomainError("Teichmuller characters are evaluated on units")
    residue = x.numerator * pow(x.denominator, -1, p) % p
    k = _discrete_logs(p)[residue]
    return CyclotomicElement.zeta_power(conductor, (conductor // (p - 1)) * e * k)


@dataclass(frozen=True)
class LocallyConstantFunction:
    """A Schwartz function on Q_p supported on p^low Z_p, constant on p^high Z_p cosets.

    ``values[r]`` is the value on ``r * p^low + p^high Z_p`` for
    ``0 <= r < p^(high - low)``.
    """

    p: int
    low: int
    high: int
    values: tuple

    def __post_init__(self):
        if self.high < self.low:
            raise DomainError("empty coset structure")
        if len(self.values) != self.p ** (self.high - self.low):
            raise DomainError("wrong number of coset values")

    @property
    def conductor(self) -> int:
        return self.values[0].m

    @classmethod
    def indicator(cls, p: int, level: int, conductor: int) -> "LocallyConstantFunction":
        """1_{p^level Z_p}."""
        return cls(p, level, level, (CyclotomicElement.rational(conductor, 1),))

    @classmethod
    def unit_character(cls, p: int, e: int, conductor: int) -> "LocallyConstantFunction":
        """``omega^e * 1_{Z_p^x}``."""
        zero = CyclotomicElement.rational(conductor, 0)
        values = [zero] + [teichmuller_character_value(e, r, p, conductor) for r in range(1, p)]
        return cls(p, 0, 1, tuple(values))

    def __call__(self, x) -> CyclotomicElement:
        x = Fraction(x)
        m = self.conductor
        if x == 0:
            return self.values[0]
        if valuation(x, self.p) < self.low:
            return CyclotomicElement.rational(m, 0)
        scaled = x / Fraction(self.p) ** self.low
        modulus = self.p ** (self.high - self.low)
        r = scaled.numerator * pow(scaled.denominator, -1, modulus) % modulus
        return self.values[r]

    def fourier_transform(self) -> "LocallyConstantFunction":
        """``f^(y) = int f(x) psi(xy) dx`` with psi(x) = exp(2 pi i {x}_p), vol(Z_p) = 1.

        The transform is supported on p^-high Z_p and constant on p^-low Z_p
        cosets.  For y = s p^-high the integral is the finite sum
        ``p^-high * sum_r f(r p^low) psi(r s p^(low - high))``.
        """
        p, low, high = self.p, self.low, self.high
        depth = high - low
        n = p ** depth
        m = lcm(self.conductor, n)
        values = [v.lift(m) if v.m != m else v for v in self.values]
        step = m // n
        scale = Fraction(1, p) ** high if high >= 0 else Fraction(p) ** (-high)
        out = []
        for s in range(n):
            total = CyclotomicElement.rational(m, 0)
            for r, v in enumerate(values):
                if not v.is_zero():
                    total = total + v * CyclotomicElement.zeta_power(m, step * r * s)
            out.append(total * scale)
        return LocallyConstantFunction(p, -high, -low, tuple(out))


def section_conductor(p: int) -> int:
    return p * (p - 1)


def whittaker_value_p(entries, p: int, exponents) -> CyclotomicElement:
    """Whittaker value at B for character data given by Teichmuller exponents.

    ``entries`` are ``(b11, b22, b33, b23, b13, b12)`` as rationals (half-integers
    allowed off the diagonal); ``exponents = (e0, e1, e2, e3)`` stand for
    ``(chi, omega_1, omega_2, omega_3) = (omega^e0, ..., omega^e3)``.
    The off-diagonal coordinate i carries ``phi_{chi omega_i}``.
    """
    m = section_conductor(p)
    e0 = exponents[0]
    diag_fn = _double_transform_indicator(p)
    result = CyclotomicElement.rational(m, 1)
    b11, b22, b33, y1, y2, y3 = (Fraction(x) for x in entries)
    for b in (b11, b22, b33):
        result = result * diag_fn(-b)
    for y, e in zip((y1, y2, y3), exponents[1:]):
        result = result * _double_transform_character(p, (e0 + e) % (p - 1))(-2 * y)
    return result


@lru_cache(maxsize=None)
def _double_transform_indicator(p: int) -> LocallyConstantFunction:
    base = LocallyConstantFunction.indicator(p, 1, section_conductor(p))
    return base.fourier_transform().fourier_transform()


@lru_cache(maxsize=None)
def _double_transform_character(p: int, e: int) -> LocallyConstantFunction:
    base = LocallyConstantFunction.unit_character(p, e, section_conductor(p))
    return base.fourier_transform().fourier_transform()


def q_b_value(entries, p: int, exponents) -> CyclotomicElement:
    """Closed form ``chi0(8 y1 y2 y3) chi1(2 y1) chi2(2 y2) chi3(2 y3) 1_Xi(B)``."""
    m = section_conductor(p)
    b11, b22, b33, y1, y2, y3 = (Fraction(x) for x in entries)
    if not in_xi(entries, p):
        return CyclotomicElement.rational(m, 0)
    e0, e1, e2, e3 = exponents
    value = teichmuller_character_value(e0, 8 * y1 * y2 * y3, p, m)
    for y, e in ((y1, e1), (y2, e2), (y3, e3)):
        value = value * teichmuller_character_value(e, 2 * y, p, m)
    return value


def in_xi(entries, p: int) -> bool:
    """Diagonal in pZ_p and doubled off-diagonal entries p-adic units."""
    b11, b22, b33, y1, y2, y3 = (Fraction(x) for x in entries)
    for b in (b11, b22, b33):
        if b != 0 and valuation(b, p) < 1:
            return False
    return all(y != 0 and valuation(2 * y, p) == 0 for y in (y1, y2, y3))


# ---------------------------------------------------------------------------
# grid verification

def _monomial_form(v: CyclotomicElement):
    """``(c, k)`` with c > 0 rational and ``v = c * zeta_m^k``, None for zero.

    The pair is unique, so equality of monomials is equality of values.
    Raises if v is not a rational multiple of a root of unity.
    """
    if v.is_zero():
        return None
    m = v.m
    for k in range(m):
        c = (v * CyclotomicElement.zeta_power(m, -k)).rational_value()
        if c is not None and c > 0:
            return (c, k)
    raise DomainError("value is not a rational multiple of a root of unity")


def _monomial_product(parts, m):
    coeff, k = Fraction(1), 0
    for part in parts:
        if part is None:
            return None
        coeff *= part[0]
        k += part[1]
    return coeff, k % m


@dataclass(frozen=True)
class WhittakerReport:
    matrices: int
    in_xi: int
    comparisons: int
    mismatches: int

    @property
    def ok(self) -> bool:
        return self.mismatches == 0


def residue_key_values(p: int, exponents):
    """Monomial forms of the Whittaker value and of Q_B for every residue key.

    A key is ``(b11, b22, b33, 2*b23, 2*b13, 2*b12)`` reduced mod p.  Both
    sides only depend on the key: the transformed coordinate functions are
    supported on Z_p and constant on cosets of pZ_p, which is asserted.
    """
    for f in [_double_transform_indicator(p)] + [
            _double_transform_character(p, e) for e in range(p - 1)]:
        if f.low < 0 or f.high > 1:
            raise DomainError("coordinate function not determined by residues mod p")
    m = section_conductor(p)
    e0 = exponents[0]
    diag = [_monomial_form(_double_transform_indicator(p)(-b)) for b in range(p)]
    offd = [[_monomial_form(_double_transform_character(p, (e0 + e) % (p - 1))(-c))
             for c in range(p)] for e in exponents[1:]]
    zero = CyclotomicElement.rational(m, 0)
    w_values, q_values = {}, {}
    for key in _product_range(p, 6):
        b11, b22, b33, c23, c13, c12 = key
        w_values[key] = _monomial_product(
            [diag[b11], diag[b22], diag[b33], offd[0][c23], offd[1][c13], offd[2][c12]], m)
        entries = (b11, b22, b33, Fraction(c23, 2), Fraction(c13, 2), Fraction(c12, 2))
        qv = q_b_value(entries, p, exponents) if all((c23, c13, c12)) else zero
        q_values[key] = _monomial_form(qv)
    return w_values, q_values


def _product_range(p, n):
    from itertools import product
    return product(range(p), repeat=n)


def whittaker_grid_check(p: int, diag_bound: int, exponent_values=(0, 1, 2)) -> WhittakerReport:
    """Compare the transform route with Q_B over every positive definite B.

    B ranges over half-integral 3x3 matrices with diagonal entries in
    ``1..diag_bound``; exponent tuples range over ``exponent_values**4``.
    """
    import numpy as np
    from itertools import product

    grids = list(product(exponent_values, repeat=4))
    # number of exponent tuples on which each residue key disagrees
    failures = np.zeros(p ** 6, dtype=np.int64)
    weights = p ** np.arange(5, -1, -1)
    for exps in grids:
        w_values, q_values = residue_key_values(p, exps)
        for key, w in w_values.items():
            if w != q_values[key]:
                failures[int(np.dot(key, weights))] += 1
    xi_key = np.zeros(p ** 6, dtype=bool)
    for key in _product_range(p, 6):
        if all(b == 0 for b in key[:3]) and all(key[3:]):
            xi_key[int(np.dot(key, weights))] = True

    matrices = in_xi_count = bad = 0
    for b11, b22, b33 in product(range(1, diag_bound + 1), repeat=3):
        c23, c13, c12 = _offdiagonal_grid(b11, b22, b33)
        keys = ((b11 % p) * weights[0] + (b22 % p) * weights[1] + (b33 % p) * weights[2]
                + (c23 % p) * weights[3] + (c13 % p) * weights[4] + (c12 % p) * weights[5])
        matrices += keys.size
        in_xi_count += int(xi_key[keys].sum())
        bad += int(failures[keys].sum())
    return WhittakerReport(matrices, in_xi_count, matrices * len(grids), bad)


def _offdiagonal_grid(b11, b22, b33):
    """Doubled off-diagonal triples making the half-integral B positive definite."""
    import numpy as np

    def rng(bi, bj):
        top = int((4 * bi * bj) ** 0.5) + 1
        return np.arange(-top, top + 1, dtype=np.int64)

    c23, c13, c12 = np.meshgrid(rng(b22, b33), rng(b11, b33), rng(b11, b22), indexing="ij")
    c23, c13, c12 = c23.ravel(), c13.ravel(), c12.ravel()
    # det(2B) for 2B = [[2b11, c12, c13], [c12, 2b22, c23], [c13, c23, 2b33]]
    d1, d2, d3 = 2 * b11, 2 * b22, 2 * b33
    minor2 = d1 * d2 - c12 * c12
    det = d1 * (d2 * d3 - c23 * c23) - c12 * (c12 * d3 - c23 * c13) + c13 * (c12 * c23 - d2 * c13)
    mask = (minor2 > 0) & (det > 0)
    return c23[mask], c13[mask], c12[mask]
