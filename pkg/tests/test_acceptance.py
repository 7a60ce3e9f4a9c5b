"""One test per acceptance criterion; each prints a PASS/FAIL line with its runtime.

The lines are also collected in ``conftest.ACCEPTANCE_LINES`` and echoed in the
terminal summary, so ``pytest tests/test_acceptance.py`` ends with the table.
"""

import time

import pytest

from conftest import ACCEPTANCE_LINES
from triple_eis.verification import DEFAULT_SEED, SUITES


def run_criterion(number, title, suite, budget, **kwargs):
    start = time.perf_counter()
    result = SUITES[suite](**kwargs)
    elapsed = time.perf_counter() - start
    ok = result.passed and elapsed <= budget
    line = (f"{'PASS' if ok else 'FAIL'} {number}. {title} "
            f"({elapsed:.1f} s of {budget} s, {len(result.failures)} failures)")
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert result.passed, result.failures[:5]
    assert elapsed <= budget, f"{suite} took {elapsed:.1f} s"
    return result.summary


def test_criterion_1_siegel_oracle():
    summary = run_criterion(1, "Siegel polynomials against the density oracle", "siegel", 600)
    assert summary["matrices"] >= 25
    assert set(summary["by_size"]) == {"1", "2", "3"}
    assert summary["extra_coefficients"] == 3


@pytest.mark.slow
def test_criterion_2_interpolation():
    summary = run_criterion(2, "family coefficients against classical ones mod 5^20",
                            "interpolation", 300)
    assert summary["p"] == 5 and summary["diag_bound"] == 10 and summary["precision"] == 20
    assert [run["a"] for run in summary["runs"]] == [0, 2]
    assert all(run["comparisons"] > 0 and run["mismatches"] == 0 for run in summary["runs"])


def test_criterion_3_archimedean():
    summary = run_criterion(3, "combinatorial and archimedean identities", "archimedean", 300)
    assert summary["binomial_cases"] == 455  # r1 <= 12, b + c <= r1
    assert summary["leading_term_cases"] == 20
    assert summary["parity_alphas"] == [2, 8]
    assert summary["maass_shimura_cases"] == 30


def test_criterion_4_local_functional_equation():
    summary = run_criterion(4, "local functional equation and degeneration table", "local", 60,
                            seed=DEFAULT_SEED)
    assert all(v["trials"] == 100 and v["failures"] == 0 for v in summary["shapes"].values())
    assert len(summary["shapes"]) == 4
    assert len(summary["table_rows"]) == 6


def test_criterion_5_degenerate_whittaker():
    summary = run_criterion(5, "p-adic Whittaker values against Q_B at p = 5", "whittaker", 120)
    assert summary["diag_bound"] == 2 * summary["p"] == 10
    assert summary["comparisons"] == summary["matrices"] * 3 ** 4
    assert summary["mismatches"] == 0


def test_criterion_6_trivial_zeros():
    summary = run_criterion(6, "trivial-zero classification and vanishing orders", "trivialzero", 60,
                            seed=DEFAULT_SEED)
    assert len(summary["ordinary_traces"]) == 20
    assert summary["triples"] == 22 ** 3
    assert set(summary["counts"]) <= {"case-i:order=3", "case-ii:order=2", "none:order=0"}
    assert summary["counts"]["case-i:order=3"] > 0 and summary["counts"]["case-ii:order=2"] > 0


def test_criterion_7_tate_periods():
    summary = run_criterion(7, "Tate period round trips and L-invariants", "tate", 60, seed=DEFAULT_SEED)
    trips = summary["round_trips"]
    assert len(trips) == 10 and {t["v"] for t in trips} == {1, 2, 3, 4, 5}
    assert all(t["ok"] for t in trips)


def test_criterion_8_root_numbers():
    summary = run_criterion(8, "global signs against local epsilon factors", "rootnumber", 60,
                            seed=DEFAULT_SEED)
    assert len(summary["triples"]) == 20
