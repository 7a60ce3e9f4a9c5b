"""Constant-coefficient differential operators on Sym_3 and the omega-star polynomial.

Partial derivatives are half-weighted off the diagonal: ``d_ij`` is
``d/dT_ij`` for i == j and ``(1/2) d/dT_ij`` otherwise, so that
``d_ij exp(-tr(T u)) = -u_ij exp(-tr(T u))`` for every entry.

The Wishart-type functional ``E_s[F] = int e^{-tr u} F(u) det(u)^{s-2} du / Gamma_3(s)``
equals ``F(-d) det(T)^{-s}`` at T = 1.  Pairing monomials against the Taylor
expansion of ``det(1 + X)^{-s}`` is symmetric in the two polynomials, so the
same number is ``det(1 - d)^{-s} F`` at u = 0, a finite sum because each power
of ``det(1 - d) - 1`` lowers the degree.  ``omega_star`` uses this with
``F(u) = det(u + 4 pi h)^{alpha-2}`` after translating u by h.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

from ..errors import DomainError
from .values import (
    GENS, INDEX, MATRIX_INDICES, ONE, RING, GammaValue, ParityType, SymPoly, det3, entry_name,
    gen, rational_to_qq, symmetric_matrix,
)

_POSITION = {pair: k for k, pair in enumerate(MATRIX_INDICES)}


def _position(i: int, j: int) -> int:
    return _POSITION[(min(i, j), max(i, j))]


def partial(f, prefix: str, i: int, j: int):
    """Half-weighted ``d_ij`` of a ring element with respect to ``prefix``-entries."""
    g = f.diff(gen(entry_name(prefix, i, j)))
    return g if i == j else g * rational_to_qq(Fraction(1, 2))


@dataclass(frozen=True)
class DiffOperator:
    """``scale * sum coeff * Pi**e * d^beta`` with beta a count per matrix entry."""

    terms: tuple  # ((beta, pi_power, Fraction), ...)
    scale: GammaValue = ONE

    @classmethod
    def from_dict(cls, data: dict, scale: GammaValue = ONE) -> "DiffOperator":
        return cls(tuple(sorted((b, e, c) for (b, e), c in data.items() if c)), scale)

    @classmethod
    def monomial(cls, *pairs, coeff=1, pi_power: int = 0) -> "DiffOperator":
        beta = [0] * 6
        for i, j in pairs:
            beta[_position(i, j)] += 1
        return cls(((tuple(beta), pi_power, Fraction(coeff)),))

    @classmethod
    def identity(cls) -> "DiffOperator":
        return cls.monomial()

    def __add__(self, other: "DiffOperator") -> "DiffOperator":
        if self.scale != other.scale:
            raise DomainError("operators with different scales")
        data = {}
        for b, e, c in self.terms + other.terms:
            data[(b, e)] = data.get((b, e), 0) + c
        return DiffOperator.from_dict(data, self.scale)

    def __neg__(self) -> "DiffOperator":
        return DiffOperator(tuple((b, e, -c) for b, e, c in self.terms), self.scale)

    def __sub__(self, other: "DiffOperator") -> "DiffOperator":
        return self + (-other)

    def __mul__(self, other: "DiffOperator") -> "DiffOperator":
        """Composition; constant-coefficient operators commute."""
        data = {}
        for b1, e1, c1 in self.terms:
            for b2, e2, c2 in other.terms:
                key = (tuple(x + y for x, y in zip(b1, b2)), e1 + e2)
                data[key] = data.get(key, 0) + c1 * c2
        return DiffOperator.from_dict(data, self.scale * other.scale)

    def with_scale(self, scale: GammaValue) -> "DiffOperator":
        return DiffOperator(self.terms, scale)

    def order(self) -> int:
        return max((sum(b) for b, _, _ in self.terms), default=0)

    def apply_poly(self, f, prefix: str = "T"):
        """Apply to a ring element, ignoring the scale."""
        cache = {(0,) * 6: f}
        pi = GENS["Pi"]
        out = RING.zero
        for beta, e, c in self.terms:
            out += _derivative(cache, beta, prefix) * (pi ** e) * rational_to_qq(c)
        return out

    def apply(self, f: SymPoly, prefix: str = "T") -> SymPoly:
        return SymPoly(self.apply_poly(f.poly, prefix), f.scale * self.scale)


def _derivative(cache, beta, prefix):
    if beta in cache:
        return cache[beta]
    k = next(n for n, x in enumerate(beta) if x)
    lower = list(beta)
    lower[k] -= 1
    lower = tuple(lower)
    i, j = MATRIX_INDICES[k]
    value = partial(_derivative(cache, lower, prefix), prefix, i, j)
    cache[beta] = value
    return value


def _e1() -> DiffOperator:
    return (DiffOperator.monomial((1, 1)) + DiffOperator.monomial((2, 2))
            + DiffOperator.monomial((3, 3)))


def _e2() -> DiffOperator:
    out = DiffOperator.monomial((1, 1), (2, 2))
    for (a, b) in ((1, 3), (2, 3)):
        out = out + DiffOperator.monomial((a, a), (b, b))
    for (a, b) in ((1, 2), (1, 3), (2, 3)):
        out = out - DiffOperator.monomial((a, b), (a, b))
    return out


def _e3() -> DiffOperator:
    """``det(d)`` for the symmetric matrix of half-weighted partials."""
    return (DiffOperator.monomial((1, 1), (2, 2), (3, 3))
            + DiffOperator.monomial((1, 2), (2, 3), (1, 3), coeff=2)
            - DiffOperator.monomial((1, 1), (2, 3), (2, 3))
            - DiffOperator.monomial((2, 2), (1, 3), (1, 3))
            - DiffOperator.monomial((3, 3), (1, 2), (1, 2)))


DET_PARTIAL = _e3()
# 1 - det(1 - d), a sum of operators of order 1, 2, 3.
SHIFTED_DET = _e1() - _e2() + _e3()


def _pochhammer_factor(s, k: int):
    """``(s)_k / k!`` as a ring element (s symbolic when None)."""
    if s is None:
        sg = GENS["s"]
        out = RING.one
        for j in range(k):
            out = out * (sg + j)
        return out * rational_to_qq(Fraction(1, factorial(k)))
    value = Fraction(1)
    for j in range(k):
        value *= Fraction(s) + j
    return RING(rational_to_qq(value / factorial(k)))


def det_one_minus_partial_power(f, prefix: str, s=None):
    """``det(1 - d)**(-s) f`` for a ring element f, as a finite sum."""
    degree = max((sum(m[INDEX[entry_name(prefix, i, j)]] for i, j in MATRIX_INDICES)
                  for m in f.keys()), default=0)
    out, term = f, f
    for k in range(1, degree + 1):
        term = SHIFTED_DET.apply_poly(term, prefix)
        if not term:
            break
        out += term * _pochhammer_factor(s, k)
    return out


def _set_zero(f, prefix: str):
    idx = [INDEX[entry_name(prefix, i, j)] for i, j in MATRIX_INDICES]
    return RING({m: c for m, c in f.items() if all(m[k] == 0 for k in idx)})


def wishart_expectation(f: SymPoly, s=None) -> SymPoly:
    """``E_s[F(u)]`` for a polynomial in the u-entries; s symbolic when None."""
    return SymPoly(_set_zero(det_one_minus_partial_power(f.poly, "u", s), "u"), f.scale)


def moment_by_differentiation(f: SymPoly, s=None) -> SymPoly:
    """``F(-d) det(T)^{-s}`` at T = 1, by direct differentiation.

    Independent of the pairing trick: derivatives of ``det(T)^{-s}`` are
    carried as ``P(T, s) * det(T)^{-s-j}`` and evaluated at the identity.
    Meant for small degrees.
    """
    t = symmetric_matrix("T")
    det = det3(t)
    sg = GENS["s"] if s is None else rational_to_qq(Fraction(s))
    identity = {entry_name("T", i, j): (1 if i == j else 0) for i, j in MATRIX_INDICES}
    total = RING.zero
    for monom, c in f.poly.items():
        beta = [monom[INDEX[entry_name("u", i, j)]] for i, j in MATRIX_INDICES]
        rest = list(monom)
        for i, j in MATRIX_INDICES:
            rest[INDEX[entry_name("u", i, j)]] = 0
        # state: list of (polynomial P, j) meaning P * det^(-s-j)
        state = {0: RING.one}
        for k, count in enumerate(beta):
            i, j = MATRIX_INDICES[k]
            for _ in range(count):
                new = {}
                for shift, poly in state.items():
                    # d(P det^(-s-shift)) = dP det^.. + P (-s-shift) d(det) det^(..-1)
                    dp = -partial(poly, "T", i, j)
                    if dp:
                        new[shift] = new.get(shift, RING.zero) + dp
                    dd = poly * partial(det, "T", i, j) * (sg + shift)
                    if dd:
                        new[shift + 1] = new.get(shift + 1, RING.zero) + dd
                state = new
        value = RING.zero
        for poly in state.values():
            value += poly.compose([(gen(name), v) for name, v in identity.items()])
        total += value * RING({tuple(rest): c})
    return SymPoly(total, f.scale)


def _scale_matrix_argument(f, factor_pi: bool = True):
    """Substitute T -> 4 pi T monomial by monomial."""
    idx = [INDEX[entry_name("T", i, j)] for i, j in MATRIX_INDICES]
    pi = INDEX["Pi"]
    out = {}
    for m, c in f.items():
        d = sum(m[k] for k in idx)
        m = list(m)
        m[pi] += d
        out[tuple(m)] = c * 4 ** d
    return RING(out)


@lru_cache(maxsize=None)
def _omega_star_cached(alpha: int, s):
    det = det3(symmetric_matrix("T"))
    base = det ** (alpha - 2)
    return SymPoly(_scale_matrix_argument(det_one_minus_partial_power(base, "T", s)))


def omega_star(alpha: int, s=None) -> SymPoly:
    """``omega*(h; alpha, s)`` as a polynomial in the T-entries (standing for h), s and Pi.

    Pass a rational ``s`` to specialise; ``None`` keeps s as a variable.
    """
    if int(alpha) != alpha or alpha < 2:
        raise DomainError("omega* needs an integer alpha >= 2")
    return _omega_star_cached(int(alpha), None if s is None else Fraction(s))


def omega_star_literal(alpha: int, s=None) -> SymPoly:
    """omega* by expanding ``det(u + 4 pi h)^(alpha-2)`` and taking moments term by term."""
    if alpha < 2:
        raise DomainError("omega* needs an integer alpha >= 2")
    t, u = symmetric_matrix("T"), symmetric_matrix("u")
    four_pi = GENS["Pi"] * 4
    shifted = [[u[a][b] + four_pi * t[a][b] for b in range(3)] for a in range(3)]
    return moment_by_differentiation(SymPoly(det3(shifted) ** (alpha - 2)), s)


def parity_violations(f: SymPoly) -> int:
    """Monomials ``T12^j3 T23^j1 T13^j2`` with j1, j2, j3 not all of one parity."""
    a, b, c = INDEX["T23"], INDEX["T13"], INDEX["T12"]
    return sum(1 for m in f.poly.keys() if not (m[a] % 2 == m[b] % 2 == m[c] % 2))


# --- the operators attached to parity types ---------------------------------

_D_SCALE = GammaValue(Fraction(1, 2), Fraction(-2), -1)  # 1 / (2 pi^2 i)


def d_lambda(lam) -> DiffOperator:
    lam = ParityType.parse(lam)
    if lam.triple == (0, 0, 0):
        return DiffOperator.identity()
    d011 = (DiffOperator.monomial((1, 3), (1, 2)) - DiffOperator.monomial((2, 3), (1, 1))
            + DiffOperator.monomial((2, 3), coeff=4, pi_power=1)).with_scale(_D_SCALE)
    d101 = (DiffOperator.monomial((1, 2), (3, 3))
            - DiffOperator.monomial((2, 3), (1, 3))).with_scale(_D_SCALE)
    if lam.triple == (0, 1, 1):
        return d011
    if lam.triple == (1, 0, 1):
        return d101
    return d011 * d101


def apply_D_lambda(f: SymPoly, lam) -> SymPoly:
    return d_lambda(lam).apply(f, "T")


def kernel_polynomial(M: int, lam) -> SymPoly:
    """``K^M(T; u) = D_lambda det(4 pi T + u)^M``."""
    t, u = symmetric_matrix("T"), symmetric_matrix("u")
    four_pi = GENS["Pi"] * 4
    shifted = [[four_pi * t[a][b] + u[a][b] for b in range(3)] for a in range(3)]
    return apply_D_lambda(SymPoly(det3(shifted) ** M), lam)


def substitute_zero_diagonal(f: SymPoly, weights=None, divide_by_four_pi: bool = False) -> SymPoly:
    """Put ``T_ii = 0`` and ``T_ij = w_ij z_i z_j`` (optionally divided by 4 pi).

    ``weights`` maps ``(i, j)`` to a ring element, default 1.
    """
    z = {1: INDEX["z1"], 2: INDEX["z2"], 3: INDEX["z3"]}
    diag = [INDEX[entry_name("T", i, i)] for i in (1, 2, 3)]
    offd = [((i, j), INDEX[entry_name("T", i, j)]) for i, j in ((2, 3), (1, 3), (1, 2))]
    pi = INDEX["Pi"]
    max_d = 0
    staged = []
    for m, c in f.poly.items():
        if any(m[k] for k in diag):
            continue
        m = list(m)
        factor = RING.one
        d = 0
        for (i, j), k in offd:
            e = m[k]
            if e:
                m[k] = 0
                m[z[i]] += e
                m[z[j]] += e
                d += e
                if weights is not None:
                    factor = factor * weights[(i, j)] ** e
        staged.append((m, c, d, factor))
        max_d = max(max_d, d)
    out = RING.zero
    for m, c, d, factor in staged:
        if divide_by_four_pi:
            m[pi] += max_d - d
            c = c * rational_to_qq(Fraction(1, 4 ** d))
        out += RING({tuple(m): c}) * factor
    scale = f.scale * (GammaValue.pi(-max_d) if divide_by_four_pi else ONE)
    return SymPoly(out, scale)


@dataclass(frozen=True)
class LeadingTermReport:
    M: int
    lam: tuple
    constant: GammaValue
    expected: SymPoly
    computed: SymPoly
    higher_terms_vanish: bool
    holds: bool

    def to_json(self) -> dict:
        return {"M": self.M, "lambda": list(self.lam), "C2": self.constant.to_json(),
                "expected": str(self.expected.to_sympy()),
                "computed": str(self.computed.to_sympy()),
                "higher_terms_vanish": self.higher_terms_vanish, "holds": self.holds}


def leading_constant(M: int, lam) -> GammaValue:
    """``C_2 = (2M+l1)!/(2M)! * 2^(3(l1+l2)-l1) M! / (i^(l2-l1) (M-l1-l2)!)``."""
    lam = ParityType.parse(lam)
    l1, l2 = lam.lam1, lam.lam2
    if M < l1 + l2:
        return GammaValue(Fraction(0))
    q = Fraction(factorial(2 * M + l1), factorial(2 * M)) * Fraction(2) ** (3 * (l1 + l2) - l1) \
        * Fraction(factorial(M), factorial(M - l1 - l2))
    return GammaValue(q, 0, -(l2 - l1))


def leading_polynomial(M: int, lam) -> SymPoly:
    """``c_lambda(Y2, Y3; u)`` with ``Y_i = z_i^2``."""
    lam = ParityType.parse(lam)
    l1, l2 = lam.lam1, lam.lam2
    if M < l1 + l2:
        return SymPoly(RING.zero)
    z2, z3 = GENS["z2"], GENS["z3"]
    u22, u33, u23 = GENS["u22"], GENS["u33"], GENS["u23"]
    base = -u22 * z3 ** 2 - u33 * z2 ** 2 + 2 * z2 ** 2 * z3 ** 2 + 2 * u23 * z2 * z3
    return SymPoly(base ** (M - l1 - l2) * z2 ** (l1 + l2) * z3 ** l2)


def leading_term_check(M: int, lam) -> LeadingTermReport:
    """Top ``Y1``-coefficient of ``K^M((4 pi)^-1 Y; u)`` against ``C_2 * c_lambda``."""
    lam = ParityType.parse(lam)
    if M < 0:
        raise DomainError("M must be nonnegative")
    constant = leading_constant(M, lam)
    expected = leading_polynomial(M, lam) * constant
    if M < lam.lam1 + lam.lam2:
        zero = SymPoly(RING.zero)
        return LeadingTermReport(M, lam.triple, constant, zero, zero, True, True)
    k = kernel_polynomial(M, lam)
    y_matrix = substitute_zero_diagonal(k, divide_by_four_pi=True)
    target = 2 * M - lam.lam1
    z1 = INDEX["z1"]
    higher_vanish = all(m[z1] <= target for m in y_matrix.poly.keys())
    top = {}
    for m, c in y_matrix.poly.items():
        if m[z1] == target:
            m = list(m)
            m[z1] = 0
            top[tuple(m)] = c
    computed = SymPoly(RING(top), y_matrix.scale)
    holds = higher_vanish and computed == expected
    return LeadingTermReport(M, lam.triple, constant, expected, computed, higher_vanish, holds)
