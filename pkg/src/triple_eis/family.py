"""Fourier coefficients of the four-variable Eisenstein family.

Each coefficient is stored exactly as a product of group-like sums in
Z_p[[X1, X2, X3, T]]: one monomial for the character factor and one factor
per prime l != p dividing det(2B).  Truncated power series come from
``to_series``; specialization at an arithmetic point is exact.

``direct_coefficient`` evaluates the same coefficient from the classical
side: character values are computed from Teichmueller lifts and the
cyclotomic character z -> z^m, without any diamond brackets.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from sympy import factorint

from .arith_core.iwasawa import (
    DEFAULT_CAPS,
    ArithmeticPoint,
    GroupLikeSum,
    IwasawaSeries,
    _binomial_mod,
    diamond_exponent,
    generator,
)
from .arith_core.padic import PadicNumber, teichmuller_int
from .errors import DomainError, ResourceError
from .siegel import HalfIntegralMatrix, polynomial_coefficients, relevant_primes

log = logging.getLogger(__name__)

FAMILY_PRECISION = 20


@dataclass(frozen=True)
class FamilyConfig:
    """Prime, tame level, twist exponent a and tame characters omega^(a_i)."""

    p: int = 5
    N: int = 1
    a: int = 0
    chi: Tuple[int, int, int] = (0, 0, 0)
    caps: Tuple[int, int, int, int] = DEFAULT_CAPS
    prec: int = FAMILY_PRECISION

    def __post_init__(self):
        if self.p < 3 or any(self.p % q == 0 for q in range(2, int(self.p ** 0.5) + 1)):
            raise DomainError(f"p = {self.p} must be an odd prime")
        if self.N < 1 or self.N % self.p == 0:
            raise DomainError("N must be a positive integer prime to p")
        if any(e > 1 for e in factorint(self.N).values()):
            raise DomainError("N must be square-free")
        if len(self.chi) != 3 or len(self.caps) != 4:
            raise DomainError("three character exponents and four caps expected")
        object.__setattr__(self, "a", self.a % (self.p - 1))
        object.__setattr__(self, "chi", tuple(e % (self.p - 1) for e in self.chi))

    @property
    def excluded_primes(self) -> Tuple[int, ...]:
        return tuple(sorted({self.p, *factorint(self.N)}))


# ---------------------------------------------------------------------------
# cached character data


@lru_cache(maxsize=None)
def _teich(residue: int, p: int, prec: int) -> int:
    return teichmuller_int(residue, p, prec)


def omega(x: int, p: int, prec: int) -> int:
    """Teichmueller character value omega(x) modulo p^prec."""
    return _teich(x % p, p, prec)


@lru_cache(maxsize=1 << 16)
def _exponent(x: int, p: int, prec: int) -> int:
    return diamond_exponent(x, p, prec)


# ---------------------------------------------------------------------------
# matrices


def enumerate_matrices(diag: Sequence[int], p: int) -> List[HalfIntegralMatrix]:
    """Positive definite B in Xi_p with the given diagonal."""
    b11, b22, b33 = (int(b) for b in diag)
    if min(b11, b22, b33) <= 0 or any(b % p for b in (b11, b22, b33)):
        raise DomainError(f"diagonal {diag} must be positive and divisible by {p}")

    def choices(bi, bj):
        bound = 4 * bi * bj
        top = int(bound ** 0.5) + 1
        return [c for c in range(-top, top + 1) if c * c < bound and c % p]

    out = []
    for c23 in choices(b22, b33):
        for c13 in choices(b11, b33):
            for c12 in choices(b11, b22):
                B = HalfIntegralMatrix((b11, b22, b33), (c23, c13, c12))
                if B.is_positive_definite():
                    out.append(B)
    return out


def diagonals(bound: int, p: int) -> List[Tuple[int, int, int]]:
    values = range(p, bound + 1, p)
    return [d for d in itertools.product(values, repeat=3)]


# ---------------------------------------------------------------------------
# the family coefficient


def q_b_character_factor(B: HalfIntegralMatrix, config: FamilyConfig) -> GroupLikeSum:
    """The character factor as a single group-like monomial (zero off Xi_p)."""
    p, prec = config.p, config.prec
    if not B.in_xi(p):
        return GroupLikeSum(p, prec)
    c23, c13, c12 = B.doubled
    z = c12 * c23 * c13
    modulus = p ** prec
    coeff = pow(omega(z, p, prec), config.a, modulus)
    for y, e in zip((c23, c13, c12), config.chi):
        coeff = coeff * pow(omega(y, p, prec), -e, modulus) % modulus
    guard = prec + 4
    exps = (-_exponent(c23, p, guard), -_exponent(c13, p, guard),
            -_exponent(c12, p, guard), _exponent(z, p, guard))
    return GroupLikeSum.monomial(p, prec, exps, coeff)


def euler_factor(B: HalfIntegralMatrix, ell: int, config: FamilyConfig) -> GroupLikeSum:
    """F_{B,l} evaluated at the Lambda-adic argument attached to l."""
    p, prec = config.p, config.prec
    modulus = p ** prec
    coeffs = polynomial_coefficients(B, ell)
    scalar = pow(omega(ell, p, prec), sum(config.chi) - 2 * config.a, modulus)
    scalar = scalar * pow(ell, -4, modulus) % modulus
    sigma = _exponent(ell, p, prec + 4)
    terms: Dict[tuple, int] = {}
    power = 1
    for i, c in enumerate(coeffs):
        if c:
            key = (i * sigma, i * sigma, i * sigma, -2 * i * sigma)
            terms[key] = terms.get(key, 0) + c * power
        power = power * scalar % modulus
    return GroupLikeSum(p, prec, terms)


@dataclass
class FamilyCoefficient:
    """The coefficient attached to one matrix, kept as a product of factors."""

    matrix: HalfIntegralMatrix
    character: GroupLikeSum
    euler: Dict[int, GroupLikeSum] = field(default_factory=dict)

    def group_like(self) -> GroupLikeSum:
        result = self.character
        for factor in self.euler.values():
            result = result * factor
        return result

    def to_series(self, caps=None) -> IwasawaSeries:
        return self.group_like().to_series(caps or DEFAULT_CAPS)

    def specialize(self, point: ArithmeticPoint) -> PadicNumber:
        """Exact specialization; a ring map, so it is applied factorwise."""
        p = self.character.p
        prec = self.character.prec
        if self.character.is_zero():
            return PadicNumber.zero(p, prec)
        modulus = p ** prec
        value = _specialize_int(self.character, point.exponents)
        for factor in self.euler.values():
            value = value * _specialize_int(factor, point.exponents) % modulus
        return PadicNumber.from_rational(value, p, prec)


@lru_cache(maxsize=1 << 18)
def _generator_power(p: int, exponent: int, prec: int) -> int:
    return pow(generator(p), exponent, p ** prec)


def _specialize_int(f: GroupLikeSum, ks) -> int:
    modulus = f.p ** f.prec
    exp_modulus = (f.p - 1) * f.p ** (f.prec - 1)
    total = 0
    for exps, c in f.terms.items():
        # u has order p^(prec-1) modulo p^prec
        e = (ks[0] * exps[0] + ks[1] * exps[1] + ks[2] * exps[2] + ks[3] * exps[3]) % exp_modulus
        total += c * _generator_power(f.p, e, f.prec)
    return total % modulus


def family_coefficient(B: HalfIntegralMatrix, config: FamilyConfig) -> FamilyCoefficient:
    character = q_b_character_factor(B, config)
    if character.is_zero():
        return FamilyCoefficient(B, character, {})
    euler = {ell: euler_factor(B, ell, config)
             for ell in relevant_primes(B, config.excluded_primes)}
    return FamilyCoefficient(B, character, euler)


# ---------------------------------------------------------------------------
# the classical side


def _check_point(point: ArithmeticPoint):
    if not point.is_balanced() or not point.is_critical():
        raise DomainError(f"point {point.exponents} is not balanced and critical")


def direct_coefficient(B: HalfIntegralMatrix, point: ArithmeticPoint,
                       config: FamilyConfig) -> PadicNumber:
    """Classical coefficient at a balanced critical point, evaluated p-adically."""
    _check_point(point)
    p, prec = config.p, config.prec
    if not B.in_xi(p):
        return PadicNumber.zero(p, prec)
    modulus = p ** prec
    k1, k2, k3 = point.weights
    n = point.kP
    c23, c13, c12 = B.doubled
    z = c12 * c23 * c13
    # Q_B(chi eps^n, omega_i eps^-k_i) with chi = omega^(a-n), omega_i = chi_i^-1 omega^k_i
    value = pow(omega(z, p, prec), config.a - n, modulus) * pow(z, n, modulus) % modulus
    for y, k, e in zip((c23, c13, c12), (k1, k2, k3), config.chi):
        value = value * pow(omega(y, p, prec), k - e, modulus) % modulus
        value = value * pow(y, -k, modulus) % modulus
    # a_B(chi^2 omega_hat, w) with w = 2n - (k1+k2+k3) + 4
    weight = 2 * n - (k1 + k2 + k3) + 4
    char_exp = 2 * (config.a - n) + (k1 + k2 + k3) - sum(config.chi)
    for ell in relevant_primes(B, config.excluded_primes):
        value = value * _direct_euler(B, ell, char_exp, weight, p, prec) % modulus
    return PadicNumber.from_rational(value, p, prec)


def _direct_euler(B, ell, char_exp, weight, p, prec) -> int:
    modulus = p ** prec
    # psi_l(l) = psi(l)^-1
    x = pow(omega(ell, p, prec), -char_exp, modulus) * pow(ell, -weight, modulus) % modulus
    result = 0
    for c in reversed(polynomial_coefficients(B, ell)):
        result = (result * x + c) % modulus
    return result


# ---------------------------------------------------------------------------
# q-expansions


@dataclass
class QExpansion:
    """Coefficients indexed by diagonals (b11, b22, b33)."""

    p: int
    diag_bound: int
    coefficients: Dict[Tuple[int, int, int], object]

    def to_json(self) -> dict:
        return {"p": self.p, "diag_bound": self.diag_bound,
                "coefficients": [{"diag": list(k), "value": v.to_json()}
                                 for k, v in sorted(self.coefficients.items())]}

    @classmethod
    def from_json(cls, data: dict) -> "QExpansion":
        try:
            coeffs = {}
            for item in data["coefficients"]:
                value = item["value"]
                if "caps" in value:
                    obj = IwasawaSeries.from_json(value)
                elif "terms" in value:
                    obj = GroupLikeSum.from_json(value)
                else:
                    obj = PadicNumber.from_json(value)
                coeffs[tuple(int(x) for x in item["diag"])] = obj
            return cls(int(data["p"]), int(data["diag_bound"]), coeffs)
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed q-expansion: {exc}") from exc

    def specialize(self, point: ArithmeticPoint) -> "QExpansion":
        return QExpansion(self.p, self.diag_bound,
                          {k: v.specialize(point) for k, v in self.coefficients.items()})


def series_from_group_like(f: GroupLikeSum, caps) -> IwasawaSeries:
    """Vectorized ``GroupLikeSum.to_series`` for sums with many terms."""
    p, prec = f.p, f.prec
    modulus = p ** prec
    caps = tuple(caps)
    if not f.terms:
        return IwasawaSeries(p, caps, prec)
    keys = list(f.terms)
    coeff = np.array([f.terms[k] for k in keys], dtype=object)
    rows = []
    for v, cap in enumerate(caps):
        cache: Dict[int, List[int]] = {}
        table = []
        for k in keys:
            s = k[v]
            if s not in cache:
                cache[s] = [_binomial_mod(s, e, p, prec) for e in range(cap + 1)]
            table.append(cache[s])
        rows.append(np.array(table, dtype=object))
    acc = (coeff[:, None] * rows[0]) % modulus
    for v in (1, 2):
        acc = (acc[:, :, None] * rows[v][:, None, :]).reshape(len(keys), -1) % modulus
    dense = acc.T.dot(rows[3]) % modulus
    table = {}
    for idx, (e1, e2, e3) in enumerate(itertools.product(*(range(c + 1) for c in caps[:3]))):
        for eT in range(caps[3] + 1):
            table[(e1, e2, e3, eT)] = int(dense[idx, eT])
    return IwasawaSeries(p, caps, prec, table)


def q_expansion(config: FamilyConfig, diag_bound: int, as_series: bool = True,
                max_matrices: int = 10 ** 6) -> QExpansion:
    """Sum of the family coefficients over each diagonal with entries <= bound."""
    p = config.p
    coeffs = {}
    total = 0
    for diag in diagonals(diag_bound, p):
        mats = enumerate_matrices(diag, p)
        total += len(mats)
        if total > max_matrices:
            raise ResourceError(f"more than {max_matrices} matrices")
        acc = GroupLikeSum(p, config.prec)
        for B in mats:
            acc = acc + family_coefficient(B, config).group_like()
        log.info("diagonal %s: %d matrices, %d group-like terms", diag, len(mats), len(acc.terms))
        coeffs[diag] = series_from_group_like(acc, config.caps) if as_series else acc
    return QExpansion(p, diag_bound, coeffs)


def balanced_critical_points(max_weight: int, min_weight: int = 2) -> List[ArithmeticPoint]:
    points = []
    for ks in itertools.product(range(min_weight, max_weight + 1), repeat=3):
        top = max(ks)
        if sum(ks) <= 2 * top:
            continue
        for kP in range(top, sum(ks) - top - 1):
            points.append(ArithmeticPoint(ks, kP))
    return points


@dataclass
class InterpolationReport:
    matrices: int = 0
    comparisons: int = 0
    mismatches: List[tuple] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.comparisons > 0 and not self.mismatches


class PointGrid:
    """Arithmetic points held as integer arrays for vectorized evaluation.

    Values are exact Python integers modulo p^prec inside numpy object
    arrays; every entry agrees with the scalar ``FamilyCoefficient.specialize``
    and ``direct_coefficient``.
    """

    def __init__(self, config: FamilyConfig, points: Sequence[ArithmeticPoint]):
        for pt in points:
            _check_point(pt)
        self.config = config
        self.points = list(points)
        ks = np.array([pt.exponents for pt in self.points], dtype=np.int64)
        self.k = [ks[:, i] for i in range(4)]
        self.kmax = int(ks.max()) if len(ks) else 0
        self.modulus = config.p ** config.prec
        self._u_tables: Dict[int, np.ndarray] = {}
        self._direct_args: Dict[int, np.ndarray] = {}

    # family side -------------------------------------------------------

    def _u_table(self, exponent: int) -> np.ndarray:
        """u^(exponent*k) for k = 0..kmax."""
        table = self._u_tables.get(exponent)
        if table is None:
            m = self.modulus
            base = pow(generator(self.config.p), exponent % (m // self.config.p), m)
            values = [1]
            for _ in range(self.kmax):
                values.append(values[-1] * base % m)
            table = np.array(values, dtype=object)
            self._u_tables[exponent] = table
        return table

    def specialize_sum(self, f: GroupLikeSum) -> np.ndarray:
        m = self.modulus
        total = np.zeros(len(self.points), dtype=object)
        for exps, c in f.terms.items():
            term = np.full(len(self.points), c, dtype=object)
            for e, k in zip(exps, self.k):
                if e:
                    term = term * self._u_table(e)[k] % m
            total = total + term
        return total % m

    def family_values(self, coefficient: FamilyCoefficient) -> np.ndarray:
        values = self.specialize_sum(coefficient.character)
        for factor in coefficient.euler.values():
            values = values * self.specialize_sum(factor) % self.modulus
        return values

    # classical side ----------------------------------------------------

    def _direct_arg(self, ell: int) -> np.ndarray:
        arg = self._direct_args.get(ell)
        if arg is None:
            cfg, m = self.config, self.modulus
            w = omega(ell, cfg.p, cfg.prec)
            vals = []
            for pt in self.points:
                total = sum(pt.weights)
                char_exp = 2 * (cfg.a - pt.kP) + total - sum(cfg.chi)
                weight = 2 * pt.kP - total + 4
                vals.append(pow(w, -char_exp, m) * pow(ell, -weight, m) % m)
            arg = np.array(vals, dtype=object)
            self._direct_args[ell] = arg
        return arg

    def direct_values(self, B: HalfIntegralMatrix) -> np.ndarray:
        cfg, m = self.config, self.modulus
        p, prec = cfg.p, cfg.prec
        count = len(self.points)
        if not B.in_xi(p):
            return np.zeros(count, dtype=object)
        k1, k2, k3, n = self.k
        c23, c13, c12 = B.doubled
        z = c12 * c23 * c13

        def powers(x, top):
            out = [1]
            for _ in range(top):
                out.append(out[-1] * x % m)
            return np.array(out, dtype=object)

        order = p - 1
        wz = powers(omega(z, p, prec), order - 1)
        values = wz[(cfg.a - n) % order] * powers(z % m, self.kmax)[n] % m
        for y, k, e in zip((c23, c13, c12), (k1, k2, k3), cfg.chi):
            wy = powers(omega(y, p, prec), order - 1)
            values = values * wy[(k - e) % order] % m
            values = values * powers(pow(y, -1, m), self.kmax)[k] % m
        for ell in relevant_primes(B, cfg.excluded_primes):
            x = self._direct_arg(ell)
            acc = np.zeros(count, dtype=object)
            for c in reversed(polynomial_coefficients(B, ell)):
                acc = (acc * x + c) % m
            values = values * acc % m
        return values


def interpolation_check(config: FamilyConfig, diag_bound: int,
                        points: Optional[Iterable[ArithmeticPoint]] = None,
                        precision: int = 20,
                        matrices: Optional[Iterable[HalfIntegralMatrix]] = None) -> InterpolationReport:
    """Compare specialized family coefficients with the classical ones mod p^precision."""
    if precision > config.prec:
        raise DomainError("comparison precision exceeds the working precision")
    points = list(points) if points is not None else balanced_critical_points(6)
    grid = PointGrid(config, points)
    if matrices is None:
        matrices = itertools.chain.from_iterable(
            enumerate_matrices(d, config.p) for d in diagonals(diag_bound, config.p))
    target = config.p ** precision
    report = InterpolationReport()
    for B in matrices:
        report.matrices += 1
        lhs = grid.family_values(family_coefficient(B, config))
        rhs = grid.direct_values(B)
        report.comparisons += len(points)
        diff = (lhs - rhs) % target
        for idx in np.nonzero(diff != 0)[0]:
            report.mismatches.append((str(B), points[idx].exponents))
    return report
