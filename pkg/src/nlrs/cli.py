"""Command-line entry point: ``nlrs <command> [flags]``.

Exit codes for ``decide``: 0 positive, 1 not positive, 2 unsupported,
3 error.  Other commands exit 0 on success, 1 when a checked property
fails, 3 on error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import random
import sys
from fractions import Fraction
from pathlib import Path

from .decision import NlrsInstance, decide, simulate, umin_sequence, verify_verdict
from .errors import NlrsError, ParseError
from .exact.algebraic import PRECISION_CAP, START_PREC
from .exact.rational import format_rational, parse_rational
from .lrs import DEFAULT_SCAN_CAP

log = logging.getLogger("nlrs")

EXIT_POSITIVE, EXIT_NOT_POSITIVE, EXIT_UNSUPPORTED, EXIT_ERROR = 0, 1, 2, 3
OUTPUT_DIR_ENV = "NLRS_OUTPUT_DIR"


# -- instance files ------------------------------------------------------------------------


def _rational_field(value, name: str) -> Fraction:
    if not isinstance(value, (str, int)) or isinstance(value, bool):
        raise ParseError(name, "expected a \"p/q\" or integer string")
    try:
        return parse_rational(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(name, str(exc)) from None


def instance_from_json(doc) -> NlrsInstance:
    if not isinstance(doc, dict):
        raise ParseError("instance", "expected a JSON object")
    for key in ("order", "coefficients", "epsilon", "initial"):
        if key not in doc:
            raise ParseError(key, "missing")
    order = doc["order"]
    if not isinstance(order, int) or isinstance(order, bool):
        raise ParseError("order", "must be an integer")
    if order < 1:
        raise ParseError("order", "must be >= 1")
    if order > 3:
        raise ParseError("order", "order must be <= 3")
    values = {}
    for key in ("coefficients", "initial"):
        items = doc[key]
        if not isinstance(items, list):
            raise ParseError(key, "must be a list")
        if len(items) != order:
            raise ParseError(key, f"needs exactly {order} entries")
        values[key] = tuple(_rational_field(x, f"{key}[{i}]") for i, x in enumerate(items))
    eps = _rational_field(doc["epsilon"], "epsilon")
    if eps < 0:
        raise ParseError("epsilon", "epsilon must be >= 0")
    return NlrsInstance(values["coefficients"], eps, values["initial"])


def parse_instance(path) -> NlrsInstance:
    """Read and validate an instance file; OSError propagates for I/O failures."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError("instance", f"invalid JSON: {exc}") from None
    return instance_from_json(doc)


def instance_to_json(inst: NlrsInstance) -> dict:
    return {
        "order": inst.order,
        "coefficients": [format_rational(c) for c in inst.coefficients],
        "epsilon": format_rational(inst.epsilon),
        "initial": [format_rational(c) for c in inst.initial],
    }


# -- output helpers ----------------------------------------------------------------------------


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, default=str) + "\n"


def _decimal(q: Fraction) -> str:
    return f"{float(q):.17g}"


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _output_dir(args) -> Path:
    path = Path(args.out_dir or os.environ.get(OUTPUT_DIR_ENV) or ".")
    path.mkdir(parents=True, exist_ok=True)
    return path


def _parse_pair(text: str, name: str) -> tuple[Fraction, Fraction]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ParseError(name, "expected two comma-separated rationals (real,imag)")
    return _rational_field(parts[0].strip(), name), _rational_field(parts[1].strip(), name)


# -- commands ------------------------------------------------------------------------------------


def cmd_decide(args, out) -> int:
    inst = parse_instance(args.instance)
    verdict = decide(inst, scan_cap=args.scan_cap, precision_start=args.precision_start)
    if verdict.outcome != "unsupported" and not verify_verdict(inst, verdict):
        raise NlrsError("verdict failed its own replay check")
    out.write(_dump(verdict.to_json()))
    return {"positive": EXIT_POSITIVE, "not_positive": EXIT_NOT_POSITIVE}.get(verdict.outcome, EXIT_UNSUPPORTED)


def _trajectory_rows(values, controls):
    rows = []
    for n, value in enumerate(values):
        control = format_rational(controls[n - 1]) if n > 0 else ""
        rows.append((n, format_rational(value), control, _decimal(value)))
    return rows


def cmd_simulate(args, out) -> int:
    inst = parse_instance(args.instance)
    if args.controls:
        controls = [_rational_field(c.strip(), "controls") for c in args.controls.split(",")]
    else:
        controls = [Fraction(0)] * max(args.horizon - 1, 0)
    traj = simulate(inst, controls)
    out.write(_csv_text(("n", "value", "control", "value_decimal"), _trajectory_rows(traj.outputs, controls)))
    return 0


def cmd_umin(args, out) -> int:
    inst = parse_instance(args.instance)
    if args.horizon < 1:
        raise ParseError("horizon", "must be >= 1")
    wc = umin_sequence(inst, args.horizon - 1)
    out.write(_csv_text(("n", "value", "control", "value_decimal"), _trajectory_rows(wc.values, wc.controls)))
    return 0


def _theta_generator(args):
    from .exact import AlgebraicNumber, Polynomial, isolate_roots
    from .lab.cf import RealGenerator

    if args.theta == "sqrt2":
        root = max((r for r, _ in isolate_roots(Polynomial([-2, 0, 1]))), key=lambda r: r.approx().real)
        return RealGenerator.algebraic(root - 1, "sqrt2-1")
    if args.theta == "golden":
        root = max((r for r, _ in isolate_roots(Polynomial([-5, 0, 1]))), key=lambda r: r.approx().real)
        return RealGenerator.algebraic((root - 1) / 2, "golden")
    re, im = _parse_pair(args.lam, "lambda")
    return RealGenerator.argument(AlgebraicNumber.gaussian(re, im), "theta")


def cmd_cf(args, out) -> int:
    from .lab.cf import cf_expand, check_prop_dio, select_r, verify_convergent_facts

    theta = _theta_generator(args)
    cfe = cf_expand(theta, args.count, start_bits=args.precision_start, cap=args.precision_cap)
    facts = verify_convergent_facts(cfe, scan_bound=args.scan_bound)
    sel = select_r(cfe)
    dio = check_prop_dio(cfe, sel, trials=args.trials, seed=args.seed)
    out.write(_dump({
        "theta": theta.label,
        "quotients": list(cfe.quotients),
        "convergents": [[p, q] for p, q in zip(cfe.numerators, cfe.denominators)],
        "convergent_facts": facts.to_json(),
        "selection": sel.to_json(),
        "diophantine": dio.to_json(),
    }))
    return 0 if facts.ok and dio.ok else 1


def _lab_records(args):
    from .lab.cf import cf_expand, select_r
    from .lab.delta import Oscillator, enumerate_delta

    lam_re, lam_im = _parse_pair(args.lam, "lambda")
    a_re, a_im = _parse_pair(args.a, "a")
    osc = Oscillator.gaussian(lam_re, lam_im, a_re, a_im)
    cfe = cf_expand(osc.theta, max(2 * args.levels + 4, 12), start_bits=args.precision_start,
                    cap=args.precision_cap)
    sel = select_r(cfe)
    rs = sel.denominators[: args.levels]
    records = [enumerate_delta(osc, r, args.m_max, level) for level, r in enumerate(rs, 1)]
    return osc, sel, records


def cmd_lab_delta(args, out) -> int:
    from .lab.delta import member_rows

    _, sel, records = _lab_records(args)
    path = _output_dir(args) / "delta_members.csv"
    path.write_text(_csv_text(("level", "r_n", "j", "m_nj"), [row[:4] for row in member_rows(records)]))
    out.write(_dump({"selection": sel.to_json(), "records": [rec.to_json() for rec in records],
                     "csv": str(path)}))
    return 0 if all(rec.consistent for rec in records) else 1


def cmd_lab_gaps(args, out) -> int:
    from .lab.delta import gap_report

    _, _, records = _lab_records(args)
    stats = gap_report(records)
    out.write(_dump(stats.to_json()))
    return 0


def cmd_lab_residual(args, out) -> int:
    from .lab.delta import CSV_COLUMNS, fit_constant, residual_curve, residual_rows, theoretical_constant

    osc, _, records = _lab_records(args)
    usable = [rec for rec in records if len(rec.members) >= args.delta + 1]
    curves = [residual_curve(osc, rec, max_delta=args.delta) for rec in usable]
    at_delta = [curve[args.delta] for curve in curves]
    constant = fit_constant(at_delta) if at_delta else None
    reports = []
    for rep in at_delta:
        data = rep.to_json()
        data["C"] = str(constant)
        data["within_C"] = rep.within(constant)
        reports.append(data)
    logs = [rep.log2_residual for rep in at_delta]
    path = _output_dir(args) / "residual_curve.csv"
    path.write_text(_csv_text(CSV_COLUMNS, residual_rows(curves, usable)))
    bound = theoretical_constant(osc)
    out.write(_dump({
        "delta": args.delta,
        "fitted_C": float(constant) if constant is not None else None,
        "theoretical_C": float(bound),
        "log_residual_decreasing": all(a > b for a, b in zip(logs, logs[1:])),
        "reports": reports,
        "csv": str(path),
    }))
    ok = constant is not None and constant <= bound and all(a > b for a, b in zip(logs, logs[1:]))
    return 0 if ok else 1


def cmd_verify_props(args, out) -> int:
    from .props import run_suites

    report = run_suites(seed=args.seed)
    out.write(_dump(report))
    return 0 if all(s["passed"] for s in report.values()) else 1


COMMANDS = {
    "decide": cmd_decide,
    "simulate": cmd_simulate,
    "umin": cmd_umin,
    "cf": cmd_cf,
    "lab-delta": cmd_lab_delta,
    "lab-residual": cmd_lab_residual,
    "lab-gaps": cmd_lab_gaps,
    "verify-props": cmd_verify_props,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision-start", type=int, default=START_PREC)
    common.add_argument("--precision-cap", type=int, default=PRECISION_CAP)
    common.add_argument("--horizon", type=int, default=10)
    common.add_argument("--scan-cap", type=int, default=DEFAULT_SCAN_CAP)
    common.add_argument("--levels", type=int, default=4)
    common.add_argument("--delta", type=int, default=2)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out-dir", default=None, help=f"where CSV files go (default ${OUTPUT_DIR_ENV} or .)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="nlrs", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("decide", "simulate", "umin"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("instance", help="instance JSON file")
        if name == "simulate":
            p.add_argument("--controls", default="", help="comma-separated controls, e.g. -1/4,1/4")
    p = sub.add_parser("cf", parents=[common])
    p.add_argument("--theta", choices=("sqrt2", "golden", "arg"), default="arg")
    p.add_argument("--lambda", dest="lam", default="3/10,4/10")
    p.add_argument("--count", type=int, default=30)
    p.add_argument("--scan-bound", type=int, default=10_000)
    p.add_argument("--trials", type=int, default=10_000)
    for name in ("lab-delta", "lab-residual", "lab-gaps"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--lambda", dest="lam", default="3/10,4/10")
        p.add_argument("--a", default="1,0")
        p.add_argument("--m-max", type=int, default=10_000)
    sub.add_parser("verify-props", parents=[common])
    return parser


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    random.seed(args.seed)
    try:
        return COMMANDS[args.command](args, out)
    except ParseError as exc:
        print(f"nlrs: parse error in {exc}", file=sys.stderr)
    except OSError as exc:
        print(f"nlrs: {exc}", file=sys.stderr)
    except Exception as exc:  # never fabricate a verdict on internal failure
        log.debug("internal error", exc_info=True)
        print(f"nlrs: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
    return EXIT_ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
