"""Command line front end.

    simquad rule      --system besselK --alpha 1 --nu 0 --N 10 --digits 100 --format table
    simquad integrate --system besselI --nu 0 --c 1 --N 40 --digits 100 --f cos
    simquad verify    --system besselK --alpha 1 --nu 0 --N 4

Every number that crosses the interface is a decimal string.  Exit status:
0 success, 2 usage error, 3 numeric failure, 4 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation

from mpmath.libmp import to_str

from .errors import DomainError, IncompleteInputError, NumericError, SimquadError, UnsupportedOracleError
from .precision import PrecisionContext, format_fixed, serialize
from .quadrature import integrate, make_rule, named_integrand, verify_exactness
from .systems import make_system

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_VERIFY = 0, 2, 3, 4
TABLE_MAX_FRACTION = 20


@dataclass(frozen=True)
class CliConfig:
    command: str
    system: str
    alpha: str
    nu: str
    c: str
    coeffs: str | None
    N: int
    digits: int
    f: str
    format: str
    out: str | None


def _decimal_arg(text: str) -> str:
    try:
        d = Decimal(text)
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not a decimal number: {text!r}") from None
    if not d.is_finite():
        raise argparse.ArgumentTypeError(f"not a finite number: {text!r}")
    return text


def _positive_int(minimum: int):
    def conv(text: str) -> int:
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
        if value < minimum:
            raise argparse.ArgumentTypeError(f"must be >= {minimum}, got {value}")
        return value

    return conv


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--system", choices=["besselK", "besselI", "custom"], required=True)
    common.add_argument("--alpha", type=_decimal_arg, default="0", help="BesselK: alpha > -1")
    common.add_argument("--nu", type=_decimal_arg, default="0", help="BesselK: nu >= 0; BesselI: nu > -1")
    common.add_argument("--c", type=_decimal_arg, default="1", help="BesselI: c > 0")
    common.add_argument("--coeffs", metavar="PATH", help="custom system JSON file")
    common.add_argument("--N", type=_positive_int(1), required=True, help="number of nodes")
    common.add_argument("--digits", type=_positive_int(10), default=30, help="decimal digits (>= 10)")
    common.add_argument("--format", choices=["json", "csv", "table"], default="json")
    common.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="simquad", description="Simultaneous Gaussian quadrature for two measures.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("rule", parents=[common], help="print nodes and both weight vectors")
    p = sub.add_parser("integrate", parents=[common], help="apply both rules to an integrand")
    p.add_argument(
        "--f", default="one", help="one | exp_neg | cos | power:k | polycoeffs:a0,a1,... (ascending powers)"
    )
    sub.add_parser("verify", parents=[common], help="check polynomial exactness against the moments")
    return parser


def parse_config(argv=None) -> CliConfig:
    args = build_parser().parse_args(argv)
    if args.verbose:
        logging.basicConfig(level=logging.DEBUG, stream=sys.stderr)
    return CliConfig(
        command=args.command,
        system=args.system,
        alpha=args.alpha,
        nu=args.nu,
        c=args.c,
        coeffs=args.coeffs,
        N=args.N,
        digits=args.digits,
        f=getattr(args, "f", "one"),
        format=args.format,
        out=args.out,
    )


# ---------------------------------------------------------------------------
# rendering


def _csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def _table(header, rows) -> str:
    widths = [max(len(str(r[i])) for r in [header, *rows]) for i in range(len(header))]
    lines = ["  ".join(str(v).rjust(w) for v, w in zip(row, widths)) for row in [header, *rows]]
    return "\n".join(lines) + "\n"


def render_rule(rule, fmt: str) -> str:
    if fmt == "json":
        return rule.to_json()
    if fmt == "csv":
        d = rule.digits
        rows = [["j", "node", "weight1", "weight2"]]
        for j, (x, a, b) in enumerate(zip(rule.nodes, rule.weights1, rule.weights2), 1):
            rows.append([j, serialize(x, d), serialize(a, d), serialize(b, d)])
        return _csv(rows)
    frac = min(rule.digits, TABLE_MAX_FRACTION)
    rows = [
        [j, format_fixed(x, frac), format_fixed(a, frac), format_fixed(b, frac)]
        for j, (x, a, b) in enumerate(zip(rule.nodes, rule.weights1, rule.weights2), 1)
    ]
    return _table(["j", "node", "weight1", "weight2"], rows)


def render_integrals(cfg: CliConfig, system, values) -> str:
    i1, i2 = values
    d = cfg.digits
    if cfg.format == "json":
        out = {
            "system": system.descriptor(),
            "N": cfg.N,
            "digits": d,
            "integrand": cfg.f,
            "I1": serialize(i1, d),
            "I2": serialize(i2, d),
        }
        return json.dumps(out, indent=2) + "\n"
    if cfg.format == "csv":
        return _csv([["N", "digits", "integrand", "I1", "I2"], [cfg.N, d, cfg.f, serialize(i1, d), serialize(i2, d)]])
    return (
        f"N = {cfg.N}  digits = {d}  integrand = {cfg.f}\n"
        f"I1 = {to_str(i1._mpf_, d)}\n"
        f"I2 = {to_str(i2._mpf_, d)}\n"
    )


def render_report(report, fmt: str) -> str:
    if fmt == "json":
        out = {
            "N": report.N,
            "claimed": list(report.claimed),
            "passed": report.passed,
            "measures": {
                str(j): [
                    {"degree": m, "rel_error": serialize(e, 6), "tolerance": serialize(t, 6), "passed": ok}
                    for m, e, t, ok in rows
                ]
                for j, rows in report.rows.items()
            },
        }
        return json.dumps(out, indent=2) + "\n"
    rows = [
        [j, m, serialize(e, 6), serialize(t, 6), "pass" if ok else "FAIL"]
        for j, rs in report.rows.items()
        for m, e, t, ok in rs
    ]
    header = ["measure", "degree", "rel_error", "tolerance", "status"]
    if fmt == "csv":
        return _csv([header, *rows])
    summary = "".join(
        f"measure {j}: exact through degree {report.passed_through(j)} (claimed {report.claimed[j - 1]})\n"
        for j in (1, 2)
    )
    return _table(header, rows) + summary + ("PASS\n" if report.passed else "FAIL\n")


# ---------------------------------------------------------------------------
# commands


def _system(cfg: CliConfig):
    return make_system(cfg.system, alpha=cfg.alpha, nu=cfg.nu, c=cfg.c, coeffs=cfg.coeffs)


def cmd_rule(cfg: CliConfig):
    ctx = PrecisionContext(cfg.digits)
    rule = make_rule(_system(cfg), cfg.N, ctx)
    return render_rule(rule, cfg.format), EXIT_OK


def cmd_integrate(cfg: CliConfig):
    ctx = PrecisionContext(cfg.digits)
    system = _system(cfg)
    f = named_integrand(cfg.f, ctx)
    rule = make_rule(system, cfg.N, ctx)
    return render_integrals(cfg, system, integrate(rule, f)), EXIT_OK


def cmd_verify(cfg: CliConfig):
    ctx = PrecisionContext(cfg.digits)
    system = _system(cfg)
    if not (system.has_moments(1) and system.has_moments(2)):
        raise UnsupportedOracleError("verify needs moment tables for both measures")
    rule = make_rule(system, cfg.N, ctx)
    report = verify_exactness(rule, system)
    return render_report(report, cfg.format), EXIT_OK if report.passed else EXIT_VERIFY


COMMANDS = {"rule": cmd_rule, "integrate": cmd_integrate, "verify": cmd_verify}


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code or 0)
    try:
        text, status = COMMANDS[cfg.command](cfg)
    except (DomainError, IncompleteInputError, UnsupportedOracleError, OSError, json.JSONDecodeError) as exc:
        print(f"simquad: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericError as exc:
        print(f"simquad: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except SimquadError as exc:
        print(f"simquad: error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
