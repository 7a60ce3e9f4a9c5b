"""Batch verification suites: one per invariant family, shared by the CLI and the tests.

Every suite returns a ``SuiteResult`` whose ``summary`` is deterministic for a
given seed; wall-clock timings are logged but kept out of the result so that
JSON output is reproducible byte for byte.
"""

from __future__ import annotations

import logging
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Callable, Dict, List, Sequence

from .errors import DomainError, VerificationError

log = logging.getLogger(__name__)

DEFAULT_SEED = 20240601


@dataclass
class SuiteResult:
    name: str
    passed: bool
    summary: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"suite": self.name, "passed": self.passed, "summary": self.summary,
                "failures": self.failures[:20], "failure_count": len(self.failures)}


# ---------------------------------------------------------------------------
# 1. Siegel series polynomials

SIEGEL_PRIMES = (2, 3, 5, 7)
SIEGEL_ORACLE_BUDGET = 10 ** 6

_SIEGEL_CANDIDATES = (
    (1,), (2,), (3,), (4,), (6,), (8,), (9,), (12,), (25,), (49,), (50,),
    (1, 1, 1), (1, 1, 0), (1, 2, 0), (1, 3, 1), (2, 2, 2), (2, 3, 0), (3, 3, 3), (2, 4, 2),
    (3, 6, 0), (5, 5, 0), (7, 7, 7), (5, 10, 5),
    (1, 1, 1, 1, 1, 1), (1, 1, 1, 0, 0, 0), (1, 1, 2, 1, 1, 1), (2, 2, 2, 2, 2, 2),
    (1, 2, 3, 0, 0, 0), (1, 1, 3, 1, 0, 1), (2, 2, 3, 1, 1, 1), (1, 2, 2, 2, 1, 1),
    (3, 3, 3, 3, 3, 3), (1, 1, 5, 0, 0, 1), (2, 3, 4, 3, 2, 2), (1, 3, 3, 3, 1, 1),
)


def siegel_matrices(max_det: int = 200):
    """Positive definite test matrices of sizes 1 to 3 with det(2B) <= max_det."""
    from .siegel import HalfIntegralMatrix
    out = []
    for entries in _SIEGEL_CANDIDATES:
        B = HalfIntegralMatrix.from_entries(entries)
        if B.is_positive_definite() and B.det2() <= max_det:
            out.append(B)
    return out


def siegel_suite(extra: int = 3, budget: int = SIEGEL_ORACLE_BUDGET) -> SuiteResult:
    """F integral with F(0) = 1, the universal-factor identity for ``extra`` coefficients
    past deg F, agreement with the character-sum oracle within ``budget`` and
    F = 1 away from det(2B)."""
    from .siegel import series_from_polynomial, siegel_polynomial, siegel_series
    matrices = siegel_matrices()
    failures, depths, sizes = [], [], {1: 0, 2: 0, 3: 0}
    checked = 0
    for B in matrices:
        sizes[B.size] += 1
        for ell in SIEGEL_PRIMES:
            checked += 1
            try:
                poly = siegel_polynomial(B, ell, max_terms=budget, extra=extra)
            except VerificationError as exc:
                failures.append({"matrix": str(B), "prime": ell, "error": str(exc)})
                continue
            coeffs = poly.coefficients
            depths.append(poly.verified_depth)
            target = poly.degree + extra
            density = list(siegel_series(B, ell)) + [Fraction(0)] * (target + 1)
            reasons = []
            if not all(isinstance(c, int) for c in coeffs) or coeffs[0] != 1:
                reasons.append("F not integral with F(0) = 1")
            if series_from_polynomial(B, ell, coeffs, target) != density[:target + 1]:
                reasons.append("series identity fails")
            if B.det2() % ell and coeffs != (1,):
                reasons.append("F != 1 although l does not divide det(2B)")
            if poly.verified_depth < 1:
                reasons.append("oracle budget reached no coefficient")
            if reasons:
                failures.append({"matrix": str(B), "prime": ell, "error": "; ".join(reasons)})
    summary = {"matrices": len(matrices), "by_size": {str(k): v for k, v in sizes.items()},
               "pairs": checked, "extra_coefficients": extra, "oracle_budget": budget,
               "min_oracle_depth": min(depths, default=-1),
               "max_oracle_depth": max(depths, default=-1)}
    passed = not failures and len(matrices) >= 25 and all(sizes.values())
    return SuiteResult("siegel", passed, summary, failures)


# ---------------------------------------------------------------------------
# 2. interpolation of the family

def interpolation_suite(p: int = 5, twists=(0, 2), diag_bound: int = 10, max_weight: int = 6,
                        precision: int = 20) -> SuiteResult:
    from .family import FamilyConfig, balanced_critical_points, interpolation_check
    points = balanced_critical_points(max_weight)
    summary, failures = {"p": p, "diag_bound": diag_bound, "points": len(points),
                         "precision": precision, "runs": []}, []
    for a in twists:
        config = FamilyConfig(p=p, N=1, a=a, caps=(3, 3, 3, 3), prec=max(precision, 20))
        report = interpolation_check(config, diag_bound, points, precision)
        summary["runs"].append({"a": a, "matrices": report.matrices,
                                "comparisons": report.comparisons,
                                "mismatches": len(report.mismatches)})
        failures += [{"a": a, "matrix": m, "point": list(pt)} for m, pt in report.mismatches]
        if not report.ok:
            failures.append({"a": a, "error": "no comparisons made"} if not report.comparisons
                            else {"a": a, "error": "mismatches"})
    return SuiteResult("interpolation", not failures, summary, failures)


# ---------------------------------------------------------------------------
# 3. archimedean identities

def archimedean_suite(binomial_bound: int = 12, max_k: int = 8, max_M: int = 4,
                      max_alpha: int = 8, max_t: int = 4, max_weight: int = 6) -> SuiteResult:
    from .archimedean import (
        PARITY_TYPES, admissible_tuples, binomial_identity_holds, leading_term_check,
        maass_shimura_consistent, omega_star, parity_violations, projection_constant_identity,
        w_coefficient_cross_check,
    )
    failures, summary = [], {}

    count = 0
    for r1 in range(binomial_bound + 1):
        for b in range(min(r1, binomial_bound) + 1):
            for c in range(min(r1 - b, binomial_bound) + 1):
                count += 1
                if not binomial_identity_holds(r1, b, c):
                    failures.append({"check": "binomial", "r1": r1, "b": b, "c": c})
    summary["binomial_cases"] = count

    tuples = list(admissible_tuples(max_k))
    for k, l, m, r in tuples:
        cross = w_coefficient_cross_check(k, l, m, r)
        if not cross.holds:
            failures.append({"check": "w_coefficient", **cross.to_json()})
        if not projection_constant_identity(k, l, m, r):
            failures.append({"check": "projection_constant", "k": k, "l": l, "m": m, "r": r})
    summary["w_coefficient_tuples"] = len(tuples)

    leading = 0
    for lam in PARITY_TYPES:
        for M in range(max_M + 1):
            leading += 1
            report = leading_term_check(M, lam)
            if not report.holds:
                failures.append({"check": "leading_term", **report.to_json()})
    summary["leading_term_cases"] = leading

    for alpha in range(2, max_alpha + 1):
        bad = parity_violations(omega_star(alpha))
        if bad:
            failures.append({"check": "parity", "alpha": alpha, "violations": bad})
    summary["parity_alphas"] = [2, max_alpha]

    shimura = 0
    for k in range(1, max_weight + 1):
        for t in range(max_t + 1):
            shimura += 1
            if not maass_shimura_consistent(k, t):
                failures.append({"check": "maass_shimura", "k": k, "t": t})
    summary["maass_shimura_cases"] = shimura
    return SuiteResult("archimedean", not failures, summary, failures)


# ---------------------------------------------------------------------------
# 4. local functional equation and the degeneration table

def local_suite(p: int = 5, trials: int = 100, seed: int = DEFAULT_SEED,
                table_draws: int = 10) -> SuiteResult:
    from .local_factors.factors import (
        SHAPES, LocalRepGL2, degeneration_table, functional_equation_trials, random_representation,
    )
    rng = random.Random(seed)
    failures, per_shape = [], {}
    for shape in SHAPES:
        bad = functional_equation_trials(shape, p, trials, rng)
        per_shape[shape] = {"trials": trials, "failures": len(bad)}
        failures += [{"shape": shape, **b} for b in bad]
    pairs = [(LocalRepGL2.principal_series(p, 1, 1), LocalRepGL2.principal_series(p, 1, 1))]
    pairs += [(random_representation("u", p, rng), random_representation("u", p, rng))
              for _ in range(table_draws)]
    rows = set()
    for first, second in pairs:
        for row, (lhs, rhs) in degeneration_table(first, second).items():
            rows.add(row)
            if lhs != rhs:
                failures.append({"row": row, "lhs": repr(lhs), "rhs": repr(rhs)})
    summary = {"q": p, "seed": seed, "shapes": per_shape, "table_rows": sorted(rows),
               "table_draws": len(pairs)}
    return SuiteResult("local", not failures and len(rows) == 6, summary, failures)


# ---------------------------------------------------------------------------
# 5. degenerate Whittaker values

def whittaker_suite(p: int = 5, exponent_values=(0, 1, 2)) -> SuiteResult:
    from .local_factors.whittaker import whittaker_grid_check
    report = whittaker_grid_check(p, 2 * p, exponent_values)
    summary = {"p": p, "diag_bound": 2 * p, "exponents": list(exponent_values),
               "matrices": report.matrices, "in_xi": report.in_xi,
               "comparisons": report.comparisons, "mismatches": report.mismatches}
    failures = [] if report.ok else [{"mismatches": report.mismatches}]
    return SuiteResult("whittaker", report.ok and report.in_xi > 0, summary, failures)


# ---------------------------------------------------------------------------
# 6. trivial zeros

TRIVIAL_ZERO_PRIME = 101


def ordinary_traces(p: int) -> List[int]:
    """Every a_p with p not dividing a_p and a_p^2 <= 4p."""
    bound = isqrt(4 * p)
    return [a for a in range(-bound, bound + 1) if a % p]


def trivial_zero_curves(p: int, count: int, rng) -> list:
    from .local_factors.elliptic import GOOD_ORDINARY, NONSPLIT, SPLIT, EllipticCurveLocal
    traces = ordinary_traces(p)
    if count > len(traces):
        raise DomainError(f"only {len(traces)} ordinary traces exist at p = {p}")
    curves = [EllipticCurveLocal(p, SPLIT, 1, {p: 1}), EllipticCurveLocal(p, NONSPLIT, -1, {p: -1})]
    curves += [EllipticCurveLocal(1, GOOD_ORDINARY, a) for a in sorted(rng.sample(traces, count))]
    return curves


def trivial_zero_suite(p: int = TRIVIAL_ZERO_PRIME, ordinary: int = 20,
                       seed: int = DEFAULT_SEED) -> SuiteResult:
    from .local_factors.elliptic import CASE_I, CASE_II, trivial_zero_sweep
    curves = trivial_zero_curves(p, ordinary, random.Random(seed))
    report = trivial_zero_sweep(p, curves)
    counts = {f"{case}:order={order}": n for (case, order), n in sorted(report.counts.items())}
    cases = {case for case, _ in report.counts}
    summary = {"p": p, "seed": seed, "curves": len(curves),
               "ordinary_traces": [c.ap for c in curves[2:]], "triples": report.triples,
               "counts": counts}
    failures = [{"triple": list(i), "case": c, "order": o} for i, c, o in report.mismatches]
    passed = report.ok and CASE_I in cases and CASE_II in cases
    return SuiteResult("trivialzero", passed, summary, failures)


# ---------------------------------------------------------------------------
# 7. Tate periods and L-invariants

def log_one_plus_p_series(p: int, prec: int) -> Fraction:
    """Partial sum of sum_k (-1)^(k+1) p^k / k, exact through p^prec."""
    total, k = Fraction(0), 1
    while True:
        # v_p(p^k / k) >= k - log_p(k) exceeds prec once k - (k.bit_length()) > prec
        if k - k.bit_length() > prec + 1:
            return total
        total += Fraction((-1) ** (k + 1) * p ** k, k)
        k += 1


def tate_suite(p: int = 5, prec: int = 30, seed: int = DEFAULT_SEED,
               samples: int = 10) -> SuiteResult:
    from .arith_core.padic import PadicNumber
    from .local_factors.elliptic import j_of_q, l_invariant_of_period, tate_period
    rng = random.Random(seed)
    guard = 2
    failures, round_trips = [], []
    for index in range(samples):
        v = 1 + index % 5
        unit = rng.randrange(1, p ** 6)
        while unit % p == 0:
            unit = rng.randrange(1, p ** 6)
        q_true = PadicNumber.from_rational(p ** v * unit, p, prec + v + guard)
        j = j_of_q(q_true)
        q_found = tate_period(j, prec)
        ok = (q_found.valuation() == -j.valuation() == v
              and q_found.abs_prec >= prec - guard
              and q_found.equal_mod(q_true, prec - guard)
              and (j_of_q(q_found) - j).is_zero())
        round_trips.append({"v": v, "unit": unit, "ok": bool(ok), "abs_prec": q_found.abs_prec})
        if not ok:
            failures.append({"check": "tate_round_trip", "v": v, "unit": unit})
    l_checks = []
    for n in range(1, 6):
        q = PadicNumber.from_rational(p ** n * (1 + p), p, prec + n)
        value = l_invariant_of_period(q)
        series = PadicNumber.from_rational(-log_one_plus_p_series(p, prec) / (2 * n), p, prec)
        working = min(value.abs_prec, series.abs_prec)
        ok = value.equal_mod(series, working)
        l_checks.append({"n": n, "working_precision": working, "ok": ok})
        if not ok:
            failures.append({"check": "l_invariant", "n": n})
    summary = {"p": p, "prec": prec, "seed": seed, "guard_digits": guard,
               "round_trips": round_trips, "l_invariant": l_checks}
    return SuiteResult("tate", not failures, summary, failures)


# ---------------------------------------------------------------------------
# 8. root numbers

SIGN_PRIMES = (2, 3, 7, 11, 13)


def random_curve_triple(p: int, rng):
    """Three curves with square-free conductors sharing a random part of their level."""
    from .local_factors.elliptic import (
        GOOD_ORDINARY, NONSPLIT, SPLIT, EllipticCurveLocal, EllipticLocalData,
    )
    pool = list(SIGN_PRIMES) + [p]
    shared = [ell for ell in pool if rng.random() < 0.5]
    curves = []
    for _ in range(3):
        primes = sorted(set(shared) | {ell for ell in pool if rng.random() < 0.3})
        a_ell = {ell: rng.choice((1, -1)) for ell in primes}
        conductor = 1
        for ell in primes:
            conductor *= ell
        if p in a_ell:
            kind = SPLIT if a_ell[p] == 1 else NONSPLIT
            curves.append(EllipticCurveLocal(conductor, kind, a_ell[p], a_ell))
        else:
            curves.append(EllipticCurveLocal(conductor, GOOD_ORDINARY,
                                             rng.choice(ordinary_traces(p)), a_ell))
    return EllipticLocalData(p, curves)


def root_number_suite(p: int = 5, triples: int = 20, seed: int = DEFAULT_SEED) -> SuiteResult:
    from .local_factors.elliptic import epsilon_signs, signs_from_local_factors
    rng = random.Random(seed)
    failures, records = [], []
    for index in range(triples):
        data = random_curve_triple(p, rng)
        direct, local = epsilon_signs(data), signs_from_local_factors(data)
        record = {"conductors": [c.conductor for c in data.curves], "epsilon": direct.epsilon,
                  "epsilon_p": direct.epsilon_p, "sigma_minus": list(direct.sigma_minus)}
        records.append(record)
        if (direct.epsilon, direct.epsilon_p) != (local.epsilon, local.epsilon_p):
            failures.append({"triple": index, **record, "local_epsilon": local.epsilon,
                             "local_epsilon_p": local.epsilon_p})
    summary = {"p": p, "seed": seed, "triples": records,
               "signs_seen": sorted({r["epsilon"] for r in records})}
    return SuiteResult("rootnumber", not failures, summary, failures)


# ---------------------------------------------------------------------------
# driver

SUITES: Dict[str, Callable[..., SuiteResult]] = {
    "siegel": siegel_suite,
    "interpolation": interpolation_suite,
    "archimedean": archimedean_suite,
    "local": local_suite,
    "whittaker": whittaker_suite,
    "trivialzero": trivial_zero_suite,
    "tate": tate_suite,
    "rootnumber": root_number_suite,
}

# suites whose prime is a free parameter; the others pin their own
_TAKES_P = {"interpolation", "local", "whittaker", "tate", "rootnumber"}
_TAKES_SEED = {"local", "trivialzero", "tate", "rootnumber"}


def _run_one(task) -> SuiteResult:
    name, p, seed = task
    kwargs = {}
    if name in _TAKES_P and p is not None:
        kwargs["p"] = p
    if name in _TAKES_SEED:
        kwargs["seed"] = seed
    start = time.perf_counter()
    try:
        result = SUITES[name](**kwargs)
    except (VerificationError, DomainError) as exc:
        result = SuiteResult(name, False, {}, [{"error": str(exc)}])
    log.info("suite %s: %s in %.1f s", name, "PASS" if result.passed else "FAIL",
             time.perf_counter() - start)
    return result


def thread_cap() -> int:
    try:
        return max(1, int(os.environ.get("TRIPLE_EIS_THREADS", "1")))
    except ValueError as exc:
        raise DomainError("TRIPLE_EIS_THREADS must be an integer") from exc


def run_suites(names: Sequence[str], p=None, seed: int = DEFAULT_SEED,
               threads: int = None) -> List[SuiteResult]:
    """Run suites in parallel when allowed; results keep the order of ``names``."""
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise DomainError(f"unknown suites {unknown}; choose from {sorted(SUITES)}")
    tasks = [(name, p, seed) for name in names]
    threads = thread_cap() if threads is None else threads
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(threads, len(tasks))) as pool:
            return list(pool.map(_run_one, tasks))
    return [_run_one(task) for task in tasks]
