"""Command-line front end.

Every subcommand writes canonical JSON (sorted keys) to stdout or ``--out``.
Exit codes: 0 when every assertion holds, 1 when one fails, 2 for usage or
input errors.  A ``--config`` file of ``key = value`` lines supplies defaults
that explicit flags override.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence, Tuple

from sympy import isprime

from .errors import (
    DomainError, PrecisionError, ResourceError, TripleEisError, UnsupportedError, VerificationError,
)

log = logging.getLogger("triple_eis")

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


class UsageError(TripleEisError):
    """Bad flags, files or literals."""


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    p: Optional[int] = None
    precision: Optional[int] = None
    caps: Optional[Tuple[int, ...]] = None
    diag_bound: Optional[int] = None
    seed: Optional[int] = None
    out: Optional[str] = None
    verbosity: int = 0

    def validate(self) -> "RunConfig":
        if self.p is not None and (self.p < 3 or not isprime(self.p)):
            raise UsageError(f"p = {self.p} must be an odd prime")
        if self.precision is not None and self.precision < 8:
            raise UsageError("precision must be at least 8")
        if self.caps is not None and min(self.caps) < 1:
            raise UsageError("series caps must be at least 1")
        if self.diag_bound is not None and self.diag_bound < 1:
            raise UsageError("the diagonal bound must be positive")
        return self

    @classmethod
    def from_namespace(cls, ns: argparse.Namespace) -> "RunConfig":
        name = ns.command if not getattr(ns, "action", None) else f"{ns.command} {ns.action}"
        return cls(name, getattr(ns, "p", None), getattr(ns, "prec", None),
                   getattr(ns, "caps", None), getattr(ns, "diag_bound", None),
                   getattr(ns, "seed", None), ns.out, ns.verbose).validate()


def read_config_file(path: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment; keys use flag spelling."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from exc
    values = {}
    for number, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{number}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.lstrip("-").replace("-", "_")] = value.strip("\"'")
    return values


def _apply_config(parser: argparse.ArgumentParser, values: dict) -> None:
    """Install config values as defaults on every (sub)parser that knows the key."""
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            for sub in action.choices.values():
                _apply_config(sub, values)
        elif action.dest in values:
            action.default = values[action.dest]
            action.required = False


# ---------------------------------------------------------------------------
# argument types


def int_list(text: str) -> Tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def fraction_list(text: str) -> Tuple[Fraction, ...]:
    try:
        return tuple(Fraction(x) for x in text.split(","))
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated rationals, got {text!r}") from exc


def padic_literal(text: str, p: int, prec: int):
    """A rational ``a/b`` or a JSON object ``{p, val, unit, prec}``."""
    from .arith_core.padic import PadicNumber
    text = text.strip()
    if text.startswith("{"):
        try:
            value = PadicNumber.from_json(json.loads(text))
        except json.JSONDecodeError as exc:
            raise UsageError(f"malformed p-adic JSON literal: {exc}") from exc
        if value.p != p:
            raise UsageError(f"literal is {value.p}-adic but --p is {p}")
        return value
    try:
        return PadicNumber.from_rational(_power_literal(text), p, prec)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot read p-adic literal {text!r}") from exc


def _power_literal(text: str) -> Fraction:
    """Products of rationals and powers, e.g. ``1/125``, ``3*5^-4`` or ``5**-2``."""
    value = Fraction(1)
    for factor in text.replace("**", "^").split("*"):
        base, _, exponent = factor.partition("^")
        value *= Fraction(base) ** int(exponent or 1)
    return value


def load_json(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON in {path}: {exc}") from exc


def emit(payload, out: Optional[str]) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2, default=str) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_siegel(ns) -> int:
    from .siegel import HalfIntegralMatrix, siegel_polynomial
    B = HalfIntegralMatrix.from_entries(ns.matrix)
    if not B.is_positive_definite():
        raise UsageError(f"{B} is not positive definite")
    poly = siegel_polynomial(B, ns.prime, max_terms=ns.max_terms)
    if ns.json:
        emit({"matrix": list(B.entries), "det2B": B.det2(), **poly.to_json()}, ns.out)
    else:
        terms = [f"{c}*X^{i}" if i else str(c) for i, c in enumerate(poly.coefficients) if c]
        line = f"F_(B,{ns.prime})(X) = {' + '.join(terms)}  [oracle depth {poly.verified_depth}]\n"
        if ns.out:
            Path(ns.out).write_text(line)
        else:
            sys.stdout.write(line)
    return EXIT_OK


def _family_config(ns):
    from .family import FamilyConfig
    return FamilyConfig(p=ns.p, N=ns.N, a=ns.a, chi=tuple(ns.chi), caps=tuple(ns.caps),
                        prec=ns.prec)


def cmd_qexp(ns) -> int:
    from .family import q_expansion
    config = _family_config(ns)
    expansion = q_expansion(config, ns.diag_bound, as_series=not ns.exact)
    header = {"N": config.N, "a": config.a, "chi": list(config.chi), "caps": list(config.caps),
              "prec": config.prec, "representation": "group-like" if ns.exact else "series"}
    emit({**expansion.to_json(), "config": header}, ns.out)
    return EXIT_OK


def cmd_specialize(ns) -> int:
    from .arith_core.iwasawa import ArithmeticPoint
    from .arith_core.padic import PadicNumber
    from .family import FamilyConfig, QExpansion, direct_coefficient, enumerate_matrices
    data = load_json(ns.input)
    if not isinstance(data, dict):
        raise UsageError("a q-expansion JSON object is expected")
    expansion = QExpansion.from_json(data)
    point = ArithmeticPoint.parse(ns.point)
    values = expansion.specialize(point)
    out = {"point": list(point.exponents), "p": expansion.p,
           "coefficients": [{"diag": list(k), "value": v.to_json()}
                            for k, v in sorted(values.coefficients.items())]}
    status = EXIT_OK
    if ns.check:
        header = data.get("config")
        if not isinstance(header, dict):
            raise UsageError("--check needs the config header written by qexp")
        config = FamilyConfig(p=expansion.p, N=int(header["N"]), a=int(header["a"]),
                              chi=tuple(header["chi"]), caps=tuple(header["caps"]),
                              prec=int(header["prec"]))
        mismatches = []
        for diag, value in sorted(values.coefficients.items()):
            direct = PadicNumber.zero(config.p, config.prec)
            for B in enumerate_matrices(diag, config.p):
                direct = direct + direct_coefficient(B, point, config)
            if not value.equal_mod(direct, value.abs_prec):
                mismatches.append(list(diag))
        out["check"] = {"mismatches": mismatches, "passed": not mismatches}
        status = EXIT_OK if not mismatches else EXIT_FAILED
    emit(out, ns.out)
    return status


def cmd_arch(ns) -> int:
    from .archimedean import (
        coefficient_data, leading_term_check, motivic_gamma, w_coefficient,
        w_coefficient_cross_check,
    )
    if ns.action == "wcoeff":
        data = coefficient_data(ns.k, ns.l, ns.m, ns.r)
        value = w_coefficient(ns.k, ns.l, ns.m, ns.r)
        out = {**data.to_json(), "w": value.to_json(), "w_sympy": str(value.to_sympy())}
        status = EXIT_OK
        if ns.check:
            cross = w_coefficient_cross_check(ns.k, ns.l, ns.m, ns.r)
            out["cross_check"] = cross.holds
            status = EXIT_OK if cross.holds else EXIT_FAILED
        emit(out, ns.out)
        return status
    if ns.action == "check-leading":
        report = leading_term_check(ns.M, ns.lam)
        emit(report.to_json(), ns.out)
        return EXIT_OK if report.holds else EXIT_FAILED
    if ns.action == "gamma":
        if len(ns.weights) != 3:
            raise UsageError("three weights expected")
        value = motivic_gamma(ns.weights, ns.kP)
        emit({"weights": list(ns.weights), "kP": ns.kP, "gamma": value.to_json(),
              "gamma_sympy": str(value.to_sympy())}, ns.out)
        return EXIT_OK
    raise UsageError(f"unknown arch action {ns.action!r}")


def _reduction_flags(alphas, text: Optional[str]):
    if text is None:
        return [a in (1, -1) for a in alphas]
    if len(text) != 3 or set(text) - {"m", "g"}:
        raise UsageError("--reductions takes three letters from m (multiplicative), g (good)")
    return [c == "m" for c in text]


def cmd_local(ns) -> int:
    from .local_factors.elliptic import classify_roots
    from .local_factors.factors import (
        LocalRepGL2, central_point, functional_equation_trials, modified_euler_factor,
    )
    if ns.action == "ep":
        if len(ns.alphas) != 3:
            raise UsageError("three roots expected")
        flags = _reduction_flags(ns.alphas, ns.reductions)
        reps = [LocalRepGL2.from_hecke_root(ns.p, a, m) for a, m in zip(ns.alphas, flags)]
        ep = modified_euler_factor(reps)
        t0 = central_point(ns.p)
        order = ep.order_at(t0)
        cls = classify_roots(ns.p, ns.alphas, flags)
        emit({"p": ns.p, "alphas": [str(a) for a in ns.alphas], "multiplicative": flags,
              "E_p": ep.to_json(), "central_order": order,
              "central_value": repr(ep.evaluate(t0)) if order >= 0 else None,
              "leading_coefficient": repr(ep.leading_coefficient(t0)),
              "classification": cls.case, "equations": list(cls.equations)}, ns.out)
        return EXIT_OK
    if ns.action == "funceq":
        import random
        seed = ns.seed
        log.info("funceq seed %d", seed)
        failures = functional_equation_trials(ns.shape, ns.p, ns.trials, random.Random(seed))
        emit({"shape": ns.shape, "q": ns.p, "seed": seed, "trials": ns.trials,
              "failures": failures, "passed": not failures}, ns.out)
        return EXIT_OK if not failures else EXIT_FAILED
    raise UsageError(f"unknown local action {ns.action!r}")


def cmd_trivialzero(ns) -> int:
    from .local_factors.elliptic import (
        CASE_I, CASE_II, EXPECTED_ORDER, EllipticLocalData, central_vanishing_order,
        epsilon_signs, l_invariants, signs_from_local_factors, trivial_zero_classify,
    )
    try:
        text = Path(ns.data).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {ns.data}: {exc}") from exc
    data = EllipticLocalData.from_json_text(text, ns.p, ns.prec)
    cls = trivial_zero_classify(data)
    order = central_vanishing_order(data)
    signs, local = epsilon_signs(data), signs_from_local_factors(data)
    out = {"p": ns.p, "classification": cls.case, "equations": list(cls.equations),
           "central_order": order, "expected_order": EXPECTED_ORDER.get(cls.case),
           "epsilon": signs.epsilon, "epsilon_p": signs.epsilon_p,
           "sigma_minus": list(signs.sigma_minus),
           "signs_agree": (signs.epsilon, signs.epsilon_p) == (local.epsilon, local.epsilon_p)}
    if cls.case in (CASE_I, CASE_II) and all(c.tate_q is not None for c in data.curves
                                              if c.multiplicative):
        inv = l_invariants(data, cls)
        out["l_invariants"] = [x.to_json() if x is not None else None for x in inv.ell]
        out["big_L"] = inv.big_l.to_json()
        if inv.extra_factor is not None:
            extra = inv.extra_factor
            out["extra_factor"] = extra.to_json() if hasattr(extra, "to_json") else str(extra)
            out["degenerate"] = inv.degenerate
    ok = out["signs_agree"] and out["expected_order"] in (None, order)
    emit(out, ns.out)
    return EXIT_OK if ok else EXIT_FAILED


def cmd_tate(ns) -> int:
    from .local_factors.elliptic import j_of_q, l_invariant_of_period, tate_period
    j = padic_literal(ns.j, ns.p, ns.prec)
    q = tate_period(j, ns.prec)
    residual = j_of_q(q) - j
    ok = residual.is_zero()
    emit({"p": ns.p, "j": j.to_json(), "q": q.to_json(), "valuation": q.valuation(),
          "l_invariant": l_invariant_of_period(q).to_json(), "round_trip": ok}, ns.out)
    return EXIT_OK if ok else EXIT_FAILED


def cmd_verify(ns) -> int:
    from .verification import SUITES, run_suites
    names = list(SUITES) if ns.suite == "all" else ns.suite.split(",")
    log.info("verify seed %d", ns.seed)
    results = run_suites(names, p=ns.p, seed=ns.seed)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}", file=sys.stderr)
    emit({"seed": ns.seed, "suites": [r.to_json() for r in results],
          "passed": all(r.passed for r in results)}, ns.out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    from .family import FAMILY_PRECISION
    from .siegel import DEFAULT_MAX_TERMS
    from .verification import DEFAULT_SEED

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write JSON here instead of stdout")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(prog="triple-eis", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="file of key = value defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("siegel", parents=[common], help="Siegel series polynomial F_(B,l)")
    s.add_argument("--matrix", type=int_list, required=True,
                   help="b11 | b11,b22,c12 | b11,b22,b33,c23,c13,c12 (c = doubled off-diagonal)")
    s.add_argument("--prime", type=int, required=True)
    s.add_argument("--json", action="store_true")
    s.add_argument("--max-terms", type=int, default=DEFAULT_MAX_TERMS,
                   help="budget of the character-sum oracle")
    s.set_defaults(handler=cmd_siegel)

    q = sub.add_parser("qexp", parents=[common], help="family q-expansion up to a diagonal bound")
    q.add_argument("--p", type=int, default=5)
    q.add_argument("--N", type=int, default=1)
    q.add_argument("--a", type=int, default=0)
    q.add_argument("--chi", type=int_list, default=(0, 0, 0))
    q.add_argument("--diag-bound", type=int, default=10)
    q.add_argument("--caps", type=int_list, default=(3, 3, 3, 3))
    q.add_argument("--prec", type=int, default=FAMILY_PRECISION)
    q.add_argument("--exact", action="store_true",
                   help="store exact group-like sums instead of truncated series")
    q.set_defaults(handler=cmd_qexp)

    sp = sub.add_parser("specialize", parents=[common], help="specialize a stored q-expansion")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--point", required=True, help="k1,k2,k3,kP")
    sp.add_argument("--check", action="store_true",
                    help="compare with the classical coefficients computed directly")
    sp.set_defaults(handler=cmd_specialize)

    a = sub.add_parser("arch", help="archimedean coefficients and constants")
    arch = a.add_subparsers(dest="action", required=True)
    w = arch.add_parser("wcoeff", parents=[common])
    for name in ("k", "l", "m", "r"):
        w.add_argument(f"--{name}", type=int, required=True)
    w.add_argument("--check", action="store_true", help="also run the symbolic cross-check")
    lead = arch.add_parser("check-leading", parents=[common])
    lead.add_argument("--M", type=int, required=True)
    lead.add_argument("--lambda", dest="lam", required=True, help="e.g. 1,0,1")
    g = arch.add_parser("gamma", parents=[common])
    g.add_argument("--weights", type=int_list, required=True)
    g.add_argument("--kP", type=int, required=True)
    a.set_defaults(handler=cmd_arch)

    lo = sub.add_parser("local", help="local factors at p")
    local = lo.add_subparsers(dest="action", required=True)
    ep = local.add_parser("ep", parents=[common], help="modified Euler factor at the central point")
    ep.add_argument("--alphas", type=fraction_list, required=True)
    ep.add_argument("--p", type=int, default=5)
    ep.add_argument("--reductions", help="three letters m/g; default: +-1 means multiplicative")
    fe = local.add_parser("funceq", parents=[common], help="random functional-equation trials")
    fe.add_argument("--shape", required=True, help="three letters from u, S")
    fe.add_argument("--seed", type=int, default=DEFAULT_SEED)
    fe.add_argument("--trials", type=int, default=100)
    fe.add_argument("--p", type=int, default=5, help="residue field size q")
    lo.set_defaults(handler=cmd_local)

    tz = sub.add_parser("trivialzero", parents=[common], help="classify a triple of curves")
    tz.add_argument("--data", required=True, help="JSON list of three curve records")
    tz.add_argument("--p", type=int, default=5)
    tz.add_argument("--prec", type=int, default=30)
    tz.set_defaults(handler=cmd_trivialzero)

    t = sub.add_parser("tate", parents=[common], help="Tate period from a j-invariant")
    t.add_argument("--p", type=int, default=5)
    t.add_argument("--j", required=True, help="rational such as 1/125 or 3*5^-2, or p-adic JSON")
    t.add_argument("--prec", type=int, default=30)
    t.set_defaults(handler=cmd_tate)

    v = sub.add_parser("verify", parents=[common], help="run verification suites")
    v.add_argument("--suite", default="all", help="all or a comma-separated list")
    v.add_argument("--p", type=int, default=None)
    v.add_argument("--seed", type=int, default=DEFAULT_SEED)
    v.set_defaults(handler=cmd_verify)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        config_path = _config_path(argv)
        if config_path:
            _apply_config(parser, read_config_file(config_path))
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.WARNING - 10 * min(ns.verbose, 2), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        RunConfig.from_namespace(ns)
        return ns.handler(ns)
    except VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except (UsageError, DomainError, UnsupportedError, PrecisionError, ResourceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def _config_path(argv) -> Optional[str]:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    return known.config


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
