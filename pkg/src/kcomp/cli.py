"""``kcomp`` command line: count, scan, constants, verify.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 budget exceeded.
Output goes to stdout as CSV (header always present, ``\\n`` line endings) or
as one JSON object. Counts are written as decimal strings.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Any, Sequence

import mpmath

from kcomp import asymptotics, counting, suites
from kcomp.counting import BudgetExceeded, CountQuery
from kcomp.multifunc import CoprimalityConstraint

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3

FLOAT_DIGITS = 12

COUNT_COLUMNS = ("n", "k", "constraint", "method", "count", "match")
SCAN_COLUMNS = ("n", "family", "k", "s_or_t", "exact", "main", "residual", "normalized_residual")
CONSTANT_COLUMNS = ("kind", "k", "s_or_t", "prime_bound", "value", "tail_estimate")
VERIFY_COLUMNS = ("check_name", "cases_run", "failures")


class UsageError(Exception):
    pass


@dataclass
class OutputRecord:
    command: str
    parameters: dict[str, Any]
    columns: tuple[str, ...]
    rows: list[dict[str, str]] = field(default_factory=list)
    schema_version: int = SCHEMA_VERSION

    def to_json(self) -> str:
        body = {
            "schema_version": self.schema_version,
            "command": self.command,
            "parameters": self.parameters,
            "rows": self.rows,
        }
        return json.dumps(body, sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(self.columns), lineterminator="\n")
        writer.writeheader()
        writer.writerows(self.rows)
        return buf.getvalue()


def _decimal(x) -> Decimal:
    with mpmath.workdps(asymptotics.PRECISION_DPS):
        return Decimal(mpmath.nstr(mpmath.mpf(x), asymptotics.PRECISION_DPS - 5, min_fixed=0, max_fixed=0))


def fmt_real(x, digits: int = FLOAT_DIGITS) -> str:
    """Scientific notation with ``digits`` significant digits, rounded half-even."""
    d = _decimal(x)
    if d.is_zero():
        # Decimal zeros carry their exponent into the e-format; pin it to e+0
        d = Decimal(0).scaleb(1 - digits)
    return format(d, f".{digits - 1}e")


def fmt_fixed(x, digits: int) -> str:
    """Fixed-point with ``digits`` decimals, rounded half-even."""
    d = _decimal(x)
    return format(d.copy_abs() if d.is_zero() else d, f".{digits}f")


# -- argument parsing ---------------------------------------------------------------


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return v


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits 2 already; keep the message format
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--prime-bound", type=_positive, default=asymptotics.DEFAULT_PRIME_BOUND)
    p.add_argument("--work-budget", type=_positive, default=counting.DEFAULT_WORK_BUDGET)
    p.add_argument("--threads", type=_nonneg, default=1, help="worker threads, 0 = one per CPU")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized checks")


def _constraint_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--all-coprime", action="store_true", help="gcd of all parts is 1 (R)")
    g.add_argument("--split", type=int, metavar="S", help="first S parts coprime to the rest (A)")
    g.add_argument("--pairwise", "--twise", dest="twise", type=int, metavar="T", help="every T parts have gcd 1 (B)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kcomp", description="Coprimality-constrained compositions of integers.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser(
        "count",
        help="count k-compositions of n under one constraint",
        description="Columns: " + ", ".join(COUNT_COLUMNS) + ". match is empty unless the identity count was "
        "cross-checked by enumeration.",
    )
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    _constraint_flags(p)
    p.add_argument("--method", choices=("identity", "brute"), default="identity")
    _common(p)

    p = sub.add_parser(
        "scan",
        help="exact counts against main-term predictions over a range of n",
        description="Columns: " + ", ".join(SCAN_COLUMNS) + ".",
    )
    p.add_argument("--family", choices=("R", "A", "B"), required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--param", "--s-or-t", dest="param", type=int, default=0, help="s for A, t for B")
    p.add_argument("--n-from", type=int, required=True)
    p.add_argument("--n-to", type=int, required=True)
    p.add_argument("--step", type=_positive, default=1)
    _common(p)

    p = sub.add_parser(
        "constants",
        help="Euler-product constants C, D, H, L",
        description="Columns: " + ", ".join(CONSTANT_COLUMNS) + ".",
    )
    p.add_argument("--kind", choices=("C", "D", "H", "L"), required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--param", "--s-or-t", dest="param", type=int, nargs="*", help="default: every valid value")
    p.add_argument("--digits", type=_positive, default=FLOAT_DIGITS)
    _common(p)

    p = sub.add_parser(
        "verify",
        help="run self-check suites",
        description="Columns: " + ", ".join(VERIFY_COLUMNS) + ". Exit status 1 if any check fails.",
    )
    p.add_argument("suite", choices=suites.SUITES + ("all",))
    _common(p)
    return parser


def _threads(n: int) -> int:
    return n if n > 0 else (os.cpu_count() or 1)


def _constraint(args) -> CoprimalityConstraint:
    try:
        if args.all_coprime:
            return CoprimalityConstraint.all_coprime(args.k)
        if args.split is not None:
            return CoprimalityConstraint.split(args.k, args.split)
        return CoprimalityConstraint.twise(args.k, args.twise)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _constraint_label(c: CoprimalityConstraint) -> str:
    if c.kind == "all":
        return "all-coprime"
    if c.kind == "split":
        return f"split={c.param}"
    return f"twise={c.param}"


# -- subcommands ---------------------------------------------------------------------------


def cmd_count(args) -> OutputRecord:
    if args.n < 1 or args.k < 2:
        raise UsageError("need n >= 1 and k >= 2")
    c = _constraint(args)
    if args.method == "identity" and c.kind != "all" and c.k < 3:
        raise UsageError("the identity method needs k >= 3 for split and t-wise constraints")
    query = CountQuery(args.n, c, args.method)
    params = {"n": args.n, "k": c.k, "constraint": _constraint_label(c), "method": args.method}
    try:
        value = counting.count(query, work_budget=args.work_budget)
    except BudgetExceeded as exc:
        exc.record = OutputRecord("count", {**params, "partial": False}, COUNT_COLUMNS)
        raise
    match = ""
    if args.method == "identity" and args.n >= c.k:
        try:
            brute = counting.brute_count(args.n, c, work_budget=args.work_budget)
        except (BudgetExceeded, OverflowError):
            pass
        else:
            match = "true" if brute == value else "false"
    row = {
        "n": str(args.n),
        "k": str(c.k),
        "constraint": _constraint_label(c),
        "method": args.method,
        "count": str(value),
        "match": match,
    }
    return OutputRecord("count", params, COUNT_COLUMNS, [row])


def _family_constraint(family: str, k: int, param: int) -> CoprimalityConstraint:
    kind = {"R": "all", "A": "split", "B": "twise"}[family]
    try:
        return CoprimalityConstraint(kind, k, param if kind != "all" else 0)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_scan(args) -> tuple[OutputRecord, bool]:
    c = _family_constraint(args.family, args.k, args.param)
    if args.n_from < c.k:
        raise UsageError(f"--n-from must be >= k = {c.k}")
    ns = list(range(args.n_from, args.n_to + 1, args.step))
    params = {
        "family": args.family,
        "k": c.k,
        "s_or_t": c.param,
        "n_from": args.n_from,
        "n_to": args.n_to,
        "step": args.step,
        "prime_bound": args.prime_bound,
    }
    if not ns:
        params["partial"] = False
        return OutputRecord("scan", params, SCAN_COLUMNS), False
    res = asymptotics.residual_scan(
        c, ns, prime_bound=args.prime_bound, work_budget=args.work_budget, threads=_threads(args.threads)
    )
    rows = [
        {
            "n": str(r.n),
            "family": r.family,
            "k": str(r.k),
            "s_or_t": str(r.param),
            "exact": str(r.exact_count),
            "main": fmt_real(r.main_term),
            "residual": fmt_real(r.residual),
            "normalized_residual": fmt_real(r.normalized_residual),
        }
        for r in res.rows
    ]
    params["partial"] = res.partial
    if res.partial:
        params["stopped_at"] = res.stopped_at
    return OutputRecord("scan", params, SCAN_COLUMNS, rows), res.partial


def cmd_constants(args) -> OutputRecord:
    k = args.k
    if k < 3:
        raise UsageError("constants need k >= 3")
    if args.digits > asymptotics.PRECISION_DPS - 5:
        raise UsageError(f"--digits is limited to {asymptotics.PRECISION_DPS - 5}")
    split_kind = args.kind in ("C", "H")
    valid = list(range(1, k)) if split_kind else list(range(2, k + 1))
    params = args.param or valid
    bad = [p for p in params if p not in valid]
    if bad:
        raise UsageError(f"invalid {'s' if split_kind else 't'} for k={k}: {bad}")
    fn = {
        "C": asymptotics.constant_C,
        "D": asymptotics.constant_D,
        "H": asymptotics.H_at_ones,
        "L": asymptotics.L_at_ones,
    }[args.kind]
    rows = []
    for p in params:
        r = fn(k, p, args.prime_bound, threads=_threads(args.threads))
        rows.append(
            {
                "kind": args.kind,
                "k": str(k),
                "s_or_t": str(p),
                "prime_bound": str(args.prime_bound),
                "value": fmt_fixed(r.value, args.digits),
                "tail_estimate": fmt_real(r.tail_bound_estimate, 3),
            }
        )
    meta = {"kind": args.kind, "k": k, "s_or_t": params, "prime_bound": args.prime_bound, "digits": args.digits}
    return OutputRecord("constants", meta, CONSTANT_COLUMNS, rows)


def cmd_verify(args) -> tuple[OutputRecord, int]:
    opts = suites.SuiteOptions(seed=args.seed, threads=_threads(args.threads), work_budget=args.work_budget)
    results = suites.run_suite(args.suite, opts)
    rows = [
        {"check_name": r.check_name, "cases_run": str(r.cases_run), "failures": str(r.failures)} for r in results
    ]
    for r in results:
        for line in r.detail:
            print(f"{r.check_name}: {line}", file=sys.stderr)
    failures = suites.total_failures(results)
    params = {"suite": args.suite, "seed": args.seed}
    return OutputRecord("verify", params, VERIFY_COLUMNS, rows), failures


def _emit(record: OutputRecord, fmt: str, out) -> None:
    out.write(record.to_json() if fmt == "json" else record.to_csv())


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "count":
            _emit(cmd_count(args), args.format, out)
            return EXIT_OK
        if args.command == "scan":
            record, partial = cmd_scan(args)
            _emit(record, args.format, out)
            if partial:
                print(f"kcomp: scan stopped at n={record.parameters['stopped_at']}: work budget", file=sys.stderr)
                return EXIT_BUDGET
            return EXIT_OK
        if args.command == "constants":
            _emit(cmd_constants(args), args.format, out)
            return EXIT_OK
        record, failures = cmd_verify(args)
        _emit(record, args.format, out)
        return EXIT_VERIFY_FAILED if failures else EXIT_OK
    except UsageError as exc:
        print(f"kcomp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        record = getattr(exc, "record", None)
        if record is not None:
            _emit(record, args.format, out)
        print(f"kcomp: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
