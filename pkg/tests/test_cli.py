import json
from fractions import Fraction

import pytest

from triple_eis.arith_core.padic import PadicNumber, valuation
from triple_eis.cli import padic_literal, run


def run_json(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_siegel_json(capsys):
    code, data = run_json(capsys, "siegel", "--matrix", "9", "--prime", "3", "--json")
    assert code == 0
    assert data["coefficients"] == [1, 3, 9]


def test_siegel_text(capsys):
    assert run(["siegel", "--matrix", "2", "--prime", "2"]) == 0
    assert capsys.readouterr().out.startswith("F_(B,2)(X) = 1 + 2*X^1")


def test_siegel_rejects_indefinite(capsys):
    assert run(["siegel", "--matrix", "1,1,4", "--prime", "3"]) == 2


def test_arch_gamma(capsys):
    code, data = run_json(capsys, "arch", "gamma", "--weights", "2,2,2", "--kP", "2")
    assert code == 0
    assert data["gamma_sympy"] == "1/(2*pi**5)"


def test_arch_wcoeff_with_check(capsys):
    code, data = run_json(capsys, "arch", "wcoeff", "--k", "6", "--l", "4", "--m", "4", "--r", "2", "--check")
    assert code == 0
    assert data["cross_check"] is True


def test_arch_wcoeff_outside_range(capsys):
    # only r = 2 is admissible for (6, 4, 4)
    assert run(["arch", "wcoeff", "--k", "6", "--l", "4", "--m", "4", "--r", "3"]) == 2
    assert "outside the admissible range" in capsys.readouterr().err


def test_arch_check_leading(capsys):
    code, data = run_json(capsys, "arch", "check-leading", "--M", "3", "--lambda", "1,0,1")
    assert code == 0
    assert data["holds"] and data["C2"]["rational"] == "84"


def test_local_ep_case_i(capsys):
    code, data = run_json(capsys, "local", "ep", "--alphas", "1,1,1", "--p", "5")
    assert code == 0
    assert data["classification"] == "case-i"
    assert data["central_order"] == 3


def test_local_funceq(capsys):
    code, data = run_json(capsys, "local", "funceq", "--shape", "uSS", "--trials", "20", "--seed", "4")
    assert code == 0
    assert data["passed"] and data["trials"] == 20


def test_local_funceq_bad_shape(capsys):
    assert run(["local", "funceq", "--shape", "uXS"]) == 2


def test_tate(capsys):
    code, data = run_json(capsys, "tate", "--p", "5", "--j", "1/125", "--prec", "20")
    assert code == 0
    assert data["round_trip"] and data["valuation"] == 3


def test_trivialzero_from_file(capsys, tmp_path):
    records = [{"conductor": 5, "reduction_p": "split-mult", "ap": 1, "a_ell": {"5": 1},
                "tate_q": {"p": 5, "val": 3, "unit": 6, "prec": 20}}] * 3
    path = tmp_path / "curves.json"
    path.write_text(json.dumps(records))
    code, data = run_json(capsys, "trivialzero", "--data", str(path), "--p", "5", "--prec", "20")
    assert code == 0
    assert data["classification"] == "case-i"
    assert data["central_order"] == data["expected_order"] == 3
    assert data["signs_agree"]


def test_malformed_json(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("[{not json")
    assert run(["trivialzero", "--data", str(path)]) == 2
    assert run(["specialize", "--in", str(path), "--point", "2,2,2,2"]) == 2


def test_unknown_subcommand_and_missing_argument(capsys):
    assert run(["frobnicate"]) == 2
    assert run(["siegel", "--prime", "3"]) == 2


def test_precision_floor(capsys):
    assert run(["tate", "--p", "5", "--j", "1/125", "--prec", "4"]) == 2
    assert "precision" in capsys.readouterr().err


def test_composite_p_rejected(capsys):
    assert run(["tate", "--p", "9", "--j", "1/81"]) == 2


def test_config_file_supplies_defaults(capsys, tmp_path):
    config = tmp_path / "run.cfg"
    config.write_text("# defaults\nmatrix = 9\nprime = 3\njson = true\n")
    code, data = run_json(capsys, "--config", str(config), "siegel", "--json")
    assert code == 0
    assert data["coefficients"] == [1, 3, 9]
    # command-line flags beat the file
    code, data = run_json(capsys, "--config", str(config), "siegel", "--prime", "2", "--json")
    assert data["coefficients"] == [1]


def test_out_file(capsys, tmp_path):
    target = tmp_path / "g.json"
    assert run(["arch", "gamma", "--weights", "3,3,2", "--kP", "3", "--out", str(target)]) == 0
    assert json.loads(target.read_text())["gamma_sympy"] == "1/(4*pi**7)"


def test_qexp_then_specialize_check(capsys, tmp_path):
    target = tmp_path / "family.json"
    argv = ["qexp", "--p", "5", "--diag-bound", "5", "--exact", "--out", str(target)]
    assert run(argv) == 0
    first = target.read_text()
    assert run(argv) == 0
    assert target.read_text() == first  # deterministic
    code, data = run_json(capsys, "specialize", "--in", str(target), "--point", "4,4,4,4", "--check")
    assert code == 0
    assert data["check"]["passed"]
    assert data["coefficients"]


def test_verify_local_suite(capsys):
    code = run(["verify", "--suite", "local"])
    captured = capsys.readouterr()
    data = json.loads(captured.out)
    assert code == 0
    assert data["passed"] and data["suites"][0]["suite"] == "local"
    assert "PASS local" in captured.err


@pytest.mark.parametrize("text, expected", [
    ("1/125", Fraction(1, 125)), ("3*5^-2", Fraction(3, 25)), ("10", Fraction(10)), ("-7/3", Fraction(-7, 3)),
])
def test_padic_literals(text, expected):
    value = padic_literal(text, 5, 10)
    assert value.valuation() == valuation(expected, 5)
    assert value == PadicNumber.from_rational(expected, 5, 10)


def test_padic_literal_json_form():
    value = padic_literal(json.dumps(PadicNumber.from_rational(Fraction(2, 5), 5, 10).to_json()), 5, 10)
    assert value.to_fraction() == Fraction(2, 5)
