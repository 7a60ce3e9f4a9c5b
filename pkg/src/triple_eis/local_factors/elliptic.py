"""Local toolkit for triples of elliptic curves at p: trivial zeros, signs, periods.

Each curve has square-free conductor and is good ordinary or multiplicative at
p.  Its local component at p is the weight-2 representation with root
``alpha`` (the unit root of X^2 - a_p X + p, or a_p = +-1 when multiplicative)
and companion root ``beta = p/alpha``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from math import gcd, lcm
from typing import Dict, Optional, Sequence

from sympy import factorint

from ..arith_core.cyclotomic import CyclotomicElement
from ..arith_core.padic import PadicNumber, iwasawa_log
from ..errors import DomainError, PrecisionError, UnsupportedError
from .factors import LocalRepGL2, central_point, modified_euler_factor, triple_epsilon
from .whittaker import teichmuller_character_value

GOOD_ORDINARY = "good-ordinary"
SPLIT = "split-mult"
NONSPLIT = "nonsplit-mult"
REDUCTION_TYPES = (GOOD_ORDINARY, SPLIT, NONSPLIT)

DEFAULT_PRECISION = 30


@lru_cache(maxsize=4096)
def unit_root(ap: int, p: int, prec: int = DEFAULT_PRECISION) -> PadicNumber:
    """The p-adic unit root of X^2 - ap X + p (Hensel lift of ap mod p)."""
    if ap % p == 0:
        raise DomainError("a_p divisible by p: not ordinary")
    modulus = p ** prec
    x = ap % p
    for _ in range(prec.bit_length() + 1):
        f = (x * x - ap * x + p) % modulus
        df = (2 * x - ap) % modulus
        x = (x - f * pow(df, -1, modulus)) % modulus
    if (x * x - ap * x + p) % modulus:
        raise PrecisionError("Hensel iteration did not converge")
    return PadicNumber(p, 0, x, prec)


@dataclass
class EllipticCurveLocal:
    """Local data of one curve: conductor, reduction at p, a_p and a_l for l | conductor."""

    conductor: int
    reduction_p: str
    ap: int
    a_ell: Dict[int, int] = field(default_factory=dict)
    tate_q: Optional[PadicNumber] = None

    def validate(self, p: int) -> None:
        if self.reduction_p not in REDUCTION_TYPES:
            raise DomainError(f"unknown reduction type {self.reduction_p!r}")
        primes = factorint(self.conductor)
        if self.conductor < 1 or any(e > 1 for e in primes.values()):
            raise DomainError(f"conductor {self.conductor} is not square-free")
        if set(self.a_ell) != set(primes):
            raise DomainError("a_ell must be given exactly at the primes of the conductor")
        if any(v not in (1, -1) for v in self.a_ell.values()):
            raise DomainError("a_ell at a multiplicative prime must be +-1")
        multiplicative = self.reduction_p != GOOD_ORDINARY
        if multiplicative != (self.conductor % p == 0):
            raise DomainError("reduction type at p disagrees with the conductor")
        if multiplicative:
            expected = 1 if self.reduction_p == SPLIT else -1
            if self.ap != expected or self.a_ell.get(p) != expected:
                raise DomainError("a_p inconsistent with the multiplicative reduction type")
        elif self.ap % p == 0 or self.ap * self.ap > 4 * p:
            raise DomainError("good ordinary reduction needs p not dividing a_p and |a_p| <= 2 sqrt(p)")

    @property
    def multiplicative(self) -> bool:
        return self.reduction_p != GOOD_ORDINARY

    def alpha(self, p: int, prec: int = DEFAULT_PRECISION):
        if self.multiplicative:
            return Fraction(self.ap)
        return unit_root(self.ap, p, prec)

    def to_json(self) -> dict:
        out = {"conductor": self.conductor, "reduction_p": self.reduction_p, "ap": self.ap,
               "a_ell": {str(k): v for k, v in sorted(self.a_ell.items())}}
        if self.tate_q is not None:
            out["tate_q"] = self.tate_q.to_json()
        return out

    @classmethod
    def from_json(cls, data: dict) -> "EllipticCurveLocal":
        try:
            tate = data.get("tate_q")
            return cls(int(data["conductor"]), str(data["reduction_p"]), int(data["ap"]),
                       {int(k): int(v) for k, v in data.get("a_ell", {}).items()},
                       PadicNumber.from_json(tate) if tate else None)
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed curve record: {exc}") from exc


@dataclass
class EllipticLocalData:
    p: int
    curves: Sequence[EllipticCurveLocal]
    prec: int = DEFAULT_PRECISION

    def __post_init__(self):
        if len(self.curves) != 3:
            raise DomainError("a triple of curves is required")
        for curve in self.curves:
            curve.validate(self.p)

    def alphas(self):
        return [c.alpha(self.p, self.prec) for c in self.curves]

    def local_representations(self):
        return [LocalRepGL2.from_hecke_root(self.p, a, c.multiplicative)
                for a, c in zip(self.alphas(), self.curves)]

    @classmethod
    def from_json_text(cls, text: str, p: int, prec: int = DEFAULT_PRECISION) -> "EllipticLocalData":
        try:
            records = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DomainError(f"malformed JSON: {exc}") from exc
        if not isinstance(records, list):
            raise DomainError("expected a list of three curve records")
        return cls(p, [EllipticCurveLocal.from_json(r) for r in records], prec)


# ---------------------------------------------------------------------------
# trivial zeros

NONE, CASE_I, CASE_II, OTHER = "none", "case-i", "case-ii", "other"


@dataclass(frozen=True)
class TrivialZeroClassification:
    case: str
    # truth values of b1b2b3 = p^2, b1b2a3 = p^2, b1a2b3 = p^2, a1b2b3 = p^2
    equations: tuple
    # for case-ii, the index of the multiplicative curve
    special_index: Optional[int] = None


def trivial_zero_equations(data: EllipticLocalData):
    return _equations(data.p, data.alphas())


def _equations(p, a):
    b = [p / x for x in a]
    target = p * p
    return (
        b[0] * b[1] * b[2] == target,
        b[0] * b[1] * a[2] == target,
        b[0] * a[1] * b[2] == target,
        a[0] * b[1] * b[2] == target,
    )


def classify_roots(p: int, alphas, multiplicative) -> TrivialZeroClassification:
    """Classification from the roots alpha_i and the multiplicative flags."""
    a = list(alphas)
    equations = _equations(p, a)
    if not any(equations):
        return TrivialZeroClassification(NONE, equations)
    mult = [i for i, flag in enumerate(multiplicative) if flag]
    if len(mult) == 3 and a[0] * a[1] * a[2] == 1:
        return TrivialZeroClassification(CASE_I, equations)
    if len(mult) == 1:
        i = mult[0]
        j, k = [x for x in range(3) if x != i]
        if a[j] == a[i] * a[k]:
            return TrivialZeroClassification(CASE_II, equations, i)
    return TrivialZeroClassification(OTHER, equations)


def trivial_zero_classify(data: EllipticLocalData) -> TrivialZeroClassification:
    return classify_roots(data.p, data.alphas(), [c.multiplicative for c in data.curves])


def central_vanishing_order(data: EllipticLocalData) -> int:
    """Order of vanishing of the modified Euler factor at the central point."""
    return modified_euler_factor(data.local_representations()).order_at(central_point(data.p))


@dataclass(frozen=True)
class SweepReport:
    triples: int
    counts: dict
    mismatches: tuple

    @property
    def ok(self) -> bool:
        return not self.mismatches


EXPECTED_ORDER = {NONE: 0, CASE_I: 3, CASE_II: 2}


def trivial_zero_sweep(p: int, curves, prec: int = 20) -> SweepReport:
    """Classify every ordered triple from ``curves`` and compare with the
    vanishing order of the modified Euler factor at the central point.

    The expected orders are 0, 3 and 2 for none, case-i and case-ii.
    """
    from itertools import product

    for curve in curves:
        curve.validate(p)
    alphas = [c.alpha(p, prec) for c in curves]
    reps = [LocalRepGL2.from_hecke_root(p, a, c.multiplicative) for a, c in zip(alphas, curves)]
    t0 = central_point(p)
    counts, bad = {}, []
    for idx in product(range(len(curves)), repeat=3):
        cls = classify_roots(p, [alphas[i] for i in idx], [curves[i].multiplicative for i in idx])
        order = modified_euler_factor([reps[i] for i in idx]).order_at(t0)
        key = (cls.case, order)
        counts[key] = counts.get(key, 0) + 1
        if EXPECTED_ORDER.get(cls.case) != order:
            bad.append((idx, cls.case, order))
    return SweepReport(len(curves) ** 3, counts, tuple(bad))


# ---------------------------------------------------------------------------
# signs


def _primes(n: int):
    return sorted(factorint(n))


@dataclass(frozen=True)
class SignData:
    epsilon: int
    epsilon_p: int
    sigma_minus: tuple


def epsilon_signs(data: EllipticLocalData) -> SignData:
    """Global sign, p-adic sign and the set of primes of M^- with prod a_l = 1."""
    m_minus = gcd(*(c.conductor for c in data.curves))
    sigma = tuple(l for l in _primes(m_minus)
                  if data.curves[0].a_ell[l] * data.curves[1].a_ell[l] * data.curves[2].a_ell[l] == 1)
    epsilon = -(-1) ** len(sigma)
    epsilon_p = -epsilon if data.p in sigma else epsilon
    return SignData(epsilon, epsilon_p, sigma)


def local_epsilon_at(data: EllipticLocalData, ell: int) -> int:
    """Triple epsilon factor at ell, evaluated at the weight-2 central point.

    Curves of good reduction at ell enter as unramified principal series with
    trivial central character; the value does not depend on their Satake
    parameter, which is taken to be 2.
    """
    reps = []
    for curve in data.curves:
        if curve.conductor % ell == 0:
            reps.append(LocalRepGL2.steinberg(ell, curve.a_ell[ell]))
        else:
            reps.append(LocalRepGL2.principal_series(ell, 2, Fraction(1, 2)))
    value = triple_epsilon(reps).evaluate(central_point(ell)).rational_value()
    if value not in (1, -1):
        raise DomainError(f"local sign at {ell} is not +-1: {value}")
    return int(value)


def signs_from_local_factors(data: EllipticLocalData) -> SignData:
    """Signs assembled from local epsilon factors; the archimedean factor is -1."""
    m = lcm(*(c.conductor for c in data.curves))
    local = {ell: local_epsilon_at(data, ell) for ell in _primes(m)}
    away_from_p = 1
    for ell, e in local.items():
        if ell != data.p:
            away_from_p *= e
    epsilon = -away_from_p * local.get(data.p, 1)
    sigma = tuple(ell for ell, e in local.items() if e == -1)
    return SignData(epsilon, -away_from_p, sigma)


# ---------------------------------------------------------------------------
# adjoint Euler factor


def gauss_sum(e: int, p: int) -> CyclotomicElement:
    """``sum_{a mod p} omega^e(a) zeta_p^a`` in Q(zeta_{p(p-1)})."""
    m = p * (p - 1)
    total = CyclotomicElement.rational(m, 0)
    for a in range(1, p):
        total = total + teichmuller_character_value(e, a, p, m) * CyclotomicElement.zeta_power(m, (p - 1) * a)
    return total


def ep_adjoint(p: int, k: int, n: int, alpha, chi_at_p=1, p_part_exponent: int = 0):
    """Modified Euler factor of the adjoint at p.

    ``n`` is the exponent of p in the level of the newform, ``chi_at_p`` the
    value of its nebentypus at p (used when n = 0) and ``p_part_exponent`` the
    Teichmuller exponent of the p-part of the nebentypus.
    """
    e = p_part_exponent % (p - 1)
    alpha_inv2 = 1 / (alpha * alpha)
    if n == 0:
        if e:
            raise DomainError("level prime to p forces a trivial p-part of the nebentypus")
        return (1 - alpha_inv2 * chi_at_p * p ** (k - 1)) * (1 - alpha_inv2 * chi_at_p * p ** (k - 2))
    if n < 0:
        raise DomainError("negative level exponent")
    if e == 0:
        if n != 1 or k != 2:
            raise DomainError("trivial p-part needs n = 1 and weight 2")
        return -(alpha_inv2 ** n)
    if n != 1:
        raise UnsupportedError("Teichmuller-power characters have conductor p, so n must be 1")
    sign = -1 if e % 2 else 1
    return gauss_sum(e, p) * (alpha_inv2 * sign)


# ---------------------------------------------------------------------------
# Tate periods

J_SERIES_TERMS = 40


def _mul_series(a, b, n):
    out = [0] * n
    for i, x in enumerate(a[:n]):
        if x:
            for j, y in enumerate(b[: n - i]):
                out[i + j] += x * y
    return out


def _inverse_series(a, n):
    if a[0] not in (1, -1):
        raise DomainError("series inverse needs a unit constant term")
    out = [0] * n
    out[0] = a[0]
    for i in range(1, n):
        s = sum(a[j] * out[i - j] for j in range(1, min(i, len(a) - 1) + 1))
        out[i] = -s * a[0]
    return out


def _sigma3(n: int) -> int:
    return sum(d ** 3 for d in range(1, n + 1) if n % d == 0)


def eisenstein_e4(n: int):
    return [1] + [240 * _sigma3(i) for i in range(1, n)]


def eta_product_24(n: int):
    """prod_{m >= 1} (1 - q^m)^24 to n terms."""
    out = [1] + [0] * (n - 1)
    for m in range(1, n):
        factor = [1] + [0] * (n - 1)
        factor[m] = -1
        for _ in range(24):
            out = _mul_series(out, factor, n)
    return out


def inverse_j_series(n: int = J_SERIES_TERMS):
    """Coefficients of P with 1/j = q * P(q), P = prod(1 - q^m)^24 / E4^3."""
    e4 = eisenstein_e4(n)
    e4_cubed = _mul_series(_mul_series(e4, e4, n), e4, n)
    return _mul_series(eta_product_24(n), _inverse_series(e4_cubed, n), n)


def j_series(n: int = J_SERIES_TERMS):
    """Coefficients c(-1), c(0), c(1), ... of j = E4^3/Delta."""
    return _inverse_series(inverse_j_series(n), n)


def _horner(coeffs, x):
    acc = coeffs[-1] * x ** 0
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc


def j_of_q(q: PadicNumber, terms: int = J_SERIES_TERMS) -> PadicNumber:
    """j evaluated at a p-adic q of positive valuation."""
    if q.is_zero() or q.valuation() < 1:
        raise DomainError("q must have positive valuation")
    return 1 / (q * _horner(inverse_j_series(terms), q))


def tate_period(j: PadicNumber, prec: int = DEFAULT_PRECISION,
                terms: int = J_SERIES_TERMS) -> PadicNumber:
    """Solve j(q) = j for q by Newton iteration on q P(q) = 1/j."""
    if j.is_zero() or j.valuation() >= 0:
        raise DomainError("j must have negative valuation (not a Tate curve)")
    x = 1 / j
    coeffs = inverse_j_series(terms)
    f_coeffs = [0] + coeffs  # q * P(q)
    df_coeffs = [i * c for i, c in enumerate(f_coeffs)][1:]
    q = x
    for _ in range(2 * prec.bit_length() + 4):
        step = (_horner(f_coeffs, q) - x) / _horner(df_coeffs, q)
        if step.is_zero():
            break
        q = q - step
    target = min(prec, x.abs_prec)
    if q.abs_prec < target - 2:
        raise PrecisionError("Newton iteration lost too much precision")
    return q.with_precision(min(q.abs_prec, target))


# ---------------------------------------------------------------------------
# L-invariants


def l_invariant_of_period(q: PadicNumber) -> PadicNumber:
    """``-(1/2) log_p(q) / ord_p(q)`` with log_p(p) = 0."""
    v = q.valuation()
    if v <= 0:
        raise DomainError("Tate periods have positive valuation")
    return iwasawa_log(q) / (-2 * v)


@dataclass(frozen=True)
class LInvariantData:
    ell: tuple
    big_l: object
    extra_factor: object = None
    degenerate: bool = False


def l_invariants(data: EllipticLocalData, classification: TrivialZeroClassification = None,
                 periods: Optional[Sequence[Optional[PadicNumber]]] = None) -> LInvariantData:
    """l_i for multiplicative curves, the L-invariant of the triple and, in case ii,
    the extra factor ``(-p alpha^-2)(1 - alpha^-2)^2`` of an ordinary curve."""
    classification = classification or trivial_zero_classify(data)
    periods = list(periods) if periods is not None else [c.tate_q for c in data.curves]
    ells = []
    for curve, q in zip(data.curves, periods):
        if curve.multiplicative:
            if q is None:
                raise DomainError("a Tate period is required for every multiplicative curve")
            ells.append(l_invariant_of_period(q))
        else:
            ells.append(None)
    if classification.case == CASE_I:
        return LInvariantData(tuple(ells), -8 * ells[0] * ells[1] * ells[2])
    if classification.case == CASE_II:
        i = classification.special_index
        j = [x for x in range(3) if x != i][0]
        alpha_inv2 = 1 / (data.alphas()[j] ** 2)
        extra = (-data.p * alpha_inv2) * (1 - alpha_inv2) ** 2
        return LInvariantData(tuple(ells), 4 * ells[i] * ells[i], extra, _is_zero(extra))
    raise DomainError(f"no L-invariant attached to classification {classification.case!r}")


def _is_zero(x) -> bool:
    return x.is_zero() if hasattr(x, "is_zero") else x == 0


