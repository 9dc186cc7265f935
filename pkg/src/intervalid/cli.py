"""Command-line interface.

Exit codes: 0 success, 1 containment violated (``check`` only), 2 user or
input error, 3 I/O or parse error.
"""

from __future__ import annotations

import argparse
import sys

from .experiments import SweepSpec, run_sweep, write_csv
from .io import ParseError, check_document
from .model import InfluenceDiagram
from .oracle import DEFAULT_CAP, OracleCapacityError, brute_force_extremes, closure
from .query import Query, QueryError, answer

OK, VIOLATED, USER_ERROR, IO_ERROR = 0, 1, 2, 3
CONTAINMENT_TOL = 1e-9


class _Exit(Exception):
    def __init__(self, code: int, message: str = ""):
        self.code = code
        self.message = message


def _load(path: str) -> InfluenceDiagram:
    try:
        d, violations = check_document(path)
    except (OSError, ParseError) as exc:
        raise _Exit(IO_ERROR, f"error: {exc}")
    if violations:
        raise _Exit(USER_ERROR, "\n".join(str(v) for v in violations))
    return InfluenceDiagram(d._space_list, d._table_list)


def _query(d: InfluenceDiagram, args) -> Query:
    evidence = {}
    for item in args.evidence:
        node, sep, label = item.partition("=")
        if not sep or not node or not label:
            raise _Exit(USER_ERROR, f"error: evidence must look like NODE=outcome, got {item!r}")
        evidence[node] = label
    q = Query(args.target, evidence)
    try:
        q.check(d)
    except QueryError as exc:
        raise _Exit(USER_ERROR, f"error: {exc}")
    return q


def cmd_validate(args) -> int:
    try:
        _, violations = check_document(args.file)
    except (OSError, ParseError) as exc:
        raise _Exit(IO_ERROR, f"error: {exc}")
    if violations:
        for v in violations:
            print(v)
        return USER_ERROR
    print("OK")
    return OK


def cmd_query(args) -> int:
    d = _load(args.file)
    q = _query(d, args)
    res = answer(d, q)
    p = args.precision
    for label, iv in zip(res.outcomes, res.intervals):
        print(f"{label} {iv.lo:.{p}f} {iv.hi:.{p}f}")
    print(f"range {res.range:.{p}f}")
    if args.verbose:
        for step in res.transform_log:
            print(f"# {step}", file=sys.stderr)
    return OK


def _float_list(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def cmd_sweep(args) -> int:
    spec = SweepSpec.default(args.kind, bounded=args.bounded)
    try:
        if args.b_y is not None:
            spec = SweepSpec(spec.kind, _float_list(args.b_y), spec.range_grid, spec.conditionals, spec.conditional_mode)
        if args.r_y is not None:
            spec = SweepSpec(spec.kind, spec.b_y_grid, _float_list(args.r_y), spec.conditionals, spec.conditional_mode)
    except ValueError as exc:
        raise _Exit(USER_ERROR, f"error: bad grid: {exc}")
    try:
        result = run_sweep(spec)
    except ValueError as exc:
        raise _Exit(USER_ERROR, str(exc))
    if not result.rows:
        raise _Exit(USER_ERROR, "empty sweep")
    try:
        with open(args.out, "w", newline="") as fh:
            write_csv(result.rows, fh)
    except OSError as exc:
        raise _Exit(IO_ERROR, f"error: {exc}")
    print(f"{len(result.rows)} rows written to {args.out}")
    for b, r, why in result.skipped:
        print(f"skipped b_y={b:g} r_y={r:g}: {why}", file=sys.stderr)
    return OK


def cmd_check(args) -> int:
    d = _load(args.file)
    q = _query(d, args)
    res = answer(d, q)
    try:
        ext = brute_force_extremes(d, q, cap=args.cap)
    except OracleCapacityError as exc:
        raise _Exit(USER_ERROR, f"error: {exc.count} vertex combinations exceed the cap of {exc.cap}")
    oracle = closure(ext.lo) if ext.valid else [(0.0, 1.0)] * len(ext.lo)
    p = args.precision
    print(f"# {ext.assignments} vertex assignments, {ext.valid} with positive evidence probability")
    print("outcome engine_lo engine_hi oracle_lo oracle_hi slack_lo slack_hi")
    ok = True
    for label, e, o in zip(res.outcomes, res.intervals, oracle):
        slack_lo, slack_hi = o[0] - e.lo, e.hi - o[1]
        ok &= slack_lo >= -CONTAINMENT_TOL and slack_hi >= -CONTAINMENT_TOL
        print(f"{label} {e.lo:.{p}f} {e.hi:.{p}f} {o[0]:.{p}f} {o[1]:.{p}f} {slack_lo:.{p}e} {slack_hi:.{p}e}")
    print("containment OK" if ok else "containment VIOLATED")
    return OK if ok else VIOLATED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="intervalid", description="Interval influence diagram inference.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a diagram file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    for name, func, helptext in (
        ("query", cmd_query, "interval marginal or posterior of a node"),
        ("check", cmd_check, "compare the engine against the brute-force oracle"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("file")
        p.add_argument("--target", required=True)
        p.add_argument("--evidence", action="append", default=[], metavar="NODE=outcome")
        p.add_argument("--precision", type=int, default=4)
        p.set_defaults(func=func)
    sub.choices["query"].add_argument("-v", "--verbose", action="store_true", help="log transformations to stderr")
    sub.choices["check"].add_argument("--cap", type=int, default=DEFAULT_CAP, help="max vertex combinations")

    p = sub.add_parser("sweep", help="range-degradation sweep to CSV")
    p.add_argument("--kind", choices=["reversal", "removal"], required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--bounded", action="store_true", help="use bounded instead of exact conditionals")
    p.add_argument("--b-y", help="comma-separated lower-bound levels for y1")
    p.add_argument("--r-y", help="comma-separated ranges of Y (default: 0 to 1-2*b_y by .05)")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Exit as exc:
        if exc.message:
            print(exc.message, file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
