"""Command-line front end.

Subcommands
-----------
eval     value of one function at (x | tau)
reduce   move tau into the fundamental domain
expand   exact series coefficients or recurrence tables
verify   residual suites; exit status 1 when any residual exceeds its budget
table    values of one function along a real range of x

Complex literals are written ``a+bi``, ``a-bi``, ``bi`` or ``a`` without
spaces. Exit codes: 0 success, 1 verification failure, 2 domain error,
3 pole, 4 truncation failure, 64 unparsable command line.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys

from . import recur
from .errors import DomainError, EllipticError, PoleError, TruncationError
from .modular import reduce_to_fundamental
from .qkernel import EvalOptions, Tau
from .reduced import FUNCTIONS, METHODS, evaluate, parse_function
from .suites import FUNDAMENTAL_GRID, SUITES, Grid, run_suite

SCHEMA = "ellipticore/1"
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 64
REDUCTION_DRIFT_BUDGET = 1e-11
POLE_FUNCTIONS = ("zeta", "wp", "wp_prime")
TABLE_FAMILIES = tuple(f"table-{f}" for f in recur.FAMILIES)

_REAL = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_UREAL = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX = re.compile(rf"^(?:(?P<re>{_REAL})(?:(?P<sign>[+-])(?P<im>{_UREAL})?i)?|(?P<pure>{_REAL}|[+-]?)i)$")


class _Parser(argparse.ArgumentParser):
    """Parse errors exit with status 64."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def complex_literal(text: str) -> complex:
    """Parse ``a+bi`` style literals.

    Examples
    --------
    >>> complex_literal("0+50i"), complex_literal("-0.4-1e-3i"), complex_literal("2i")
    (50j, (-0.4-0.001j), 2j)
    """
    m = _COMPLEX.match(text)
    if not m:
        raise argparse.ArgumentTypeError(f"not a complex literal of the form a+bi: {text!r}")
    if m.group("re") is not None:
        re_part = float(m.group("re"))
        if m.group("sign") is None:
            return complex(re_part, 0.0)
        im = float(m.group("im")) if m.group("im") else 1.0
        return complex(re_part, -im if m.group("sign") == "-" else im)
    pure = m.group("pure")
    im = float(pure) if pure not in ("", "+", "-") else (-1.0 if pure == "-" else 1.0)
    return complex(0.0, im)


def complex_list(text: str) -> tuple:
    return tuple(complex_literal(t) for t in text.split(","))


def real_range(text: str) -> tuple:
    """``start:stop:step`` with both ends included."""
    try:
        start, stop, step = (float(t) for t in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"range must be start:stop:step, got {text!r}") from None
    if step <= 0 or stop < start:
        raise argparse.ArgumentTypeError("range needs step > 0 and stop >= start")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(round(start + k * step, 12) for k in range(n))


def _cx(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _flatten(row: dict) -> dict:
    out = {}
    for k, v in row.items():
        if isinstance(v, dict):
            for kk, vv in v.items():
                out[f"{k}_{kk}"] = vv
        else:
            out[k] = v
    return out


def _emit(payload, rows, fmt, out):
    """JSON: the payload (rows inside). CSV: one line per row."""
    if fmt == "json":
        out.write(json.dumps(payload) + "\n")
        return
    flat = [_flatten(r) for r in rows]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(flat[0]) if flat else [], lineterminator="\n")
    w.writeheader()
    for r in flat:
        w.writerow({k: ("" if v is None else v) for k, v in r.items()})
    out.write(buf.getvalue())


def _opts(args) -> EvalOptions:
    return EvalOptions(rel_tol=args.rel_tol, max_terms=args.max_terms)


# commands -----------------------------------------------------------------------

def cmd_eval(args, out, err) -> int:
    spec = parse_function(args.function)
    opts = _opts(args)
    reduce_first = not args.no_reduce
    ev = evaluate(spec, args.x, args.tau, method=args.method, order=args.order,
                  reduce_first=reduce_first, opts=opts)
    drift = None
    if reduce_first and ev.map.as_tuple() != (1, 0, 0, 1):
        try:
            direct = evaluate(spec, args.x, args.tau, method=args.method, order=args.order,
                              reduce_first=False, opts=opts).value
            drift = abs(direct - ev.value) / max(abs(ev.value), abs(direct), 1e-300)
        except TruncationError:
            drift = None
        if drift is not None and drift > REDUCTION_DRIFT_BUDGET:
            err.write(f"warning: reduced and direct evaluation differ by {drift:.3e} (relative)\n")
    row = {
        "schema": SCHEMA, "function": args.function, "x": _cx(args.x), "tau": _cx(args.tau),
        "value": _cx(ev.value), "method": args.method, "order": args.order if args.method == "series" else None,
        "terms_used": ev.terms_used, "tail_estimate": ev.tail_estimate,
        "reduced_tau": _cx(ev.reduced_tau), "map": dict(zip("abcd", ev.map.as_tuple())),
        "reduction_drift": drift,
    }
    _emit(row, [row], args.format or "json", out)
    return 0


def cmd_reduce(args, out, err) -> int:
    r = reduce_to_fundamental(Tau(args.tau))
    row = {"schema": SCHEMA, "tau": _cx(args.tau), "reduced_tau": _cx(r.reduced_tau.value),
           "map": dict(zip("abcd", r.map.as_tuple()))}
    _emit(row, [row], args.format or "json", out)
    return 0


def _monomial(names, exps) -> str:
    parts = [n if e == 1 else f"{n}^{e}" for n, e in zip(names, exps) if e]
    return "*".join(parts) or "1"


def _poly_rows(poly, basis, prefactor):
    rows = []
    for p, monom, coeff in recur.expand_rows(poly):
        rows.append({"power": p, "monomial": _monomial(poly.names, monom), "coefficient": coeff,
                     "basis": basis, "prefactor": prefactor})
    return rows


def _expand_rows(function: str, order: int, rep: str | None):
    if function in TABLE_FAMILIES:
        fam = function.split("-", 1)[1]
        t = recur.build_table(fam, order)
        if fam == "C":
            return [{"family": fam, "k": k, "value": str(t[k].as_expr())} for k in range(order + 1)]
        return [{"family": fam, "m": m, "n": n, "value": str(val)} for m, n, val in t.rows()]
    spec = parse_function(function)
    if spec.name == "sigma":
        rep = rep or "g"
        if rep == "g":
            rows = []
            for k in range(order + 1):
                ck = recur.sigma_coefficient_C(k)
                terms = sorted(ck.terms()) or [((0, 0), 0)]
                for monom, q in terms:
                    rows.append({"k": k, "power": 2 * k + 1, "monomial": _monomial(("g2", "g3"), monom),
                                 "coefficient": str(q), "basis": "x^p/p!", "prefactor": "1"})
            return rows
        if rep == "e":
            return _poly_rows(recur.xi_poly(0, order), "x^p", "1")
    elif spec.name in ("sigma1", "sigma2", "sigma3"):
        if (rep or "e") == "e":
            return _poly_rows(recur.xi_poly(1, order), "x^p", "1")
    elif spec.name == "theta":
        if (rep or "theta") == "theta":
            ch = spec.char
            if ch.parity == 0:
                sign = spec.sign * ch.classical_sign
                pre = ("" if sign > 0 else "-") + "2*pi*etahat^3"
                return _poly_rows(recur.theta1_poly(order), "x^p", f"{pre}; U=vartheta2^4, V=vartheta4^4")
            u, v = {2: "vartheta2", 3: "vartheta3"}, {3: "vartheta3", 4: "vartheta4"}
            ku, kv = recur._char_kinds(ch.alpha, ch.beta)
            return _poly_rows(recur.theta_char_poly(ch.alpha, ch.beta, order), "x^p",
                              f"vartheta[{ch.alpha},{ch.beta}]; U={u[ku]}^4, V={v[kv]}^4")
    raise DomainError(f"no expansion of {function!r} in representation {rep!r}")


def cmd_expand(args, out, err) -> int:
    rows = _expand_rows(args.function, args.order, args.representation)
    payload = {"schema": SCHEMA, "function": args.function, "order": args.order,
               "representation": args.representation, "rows": rows}
    _emit(payload, rows, args.format or "json", out)
    return 0


def _grid(args) -> Grid:
    g = Grid(taus=FUNDAMENTAL_GRID) if args.grid == "fundamental" else Grid()
    return Grid(xs=args.x_points or g.xs, taus=args.tau_points or g.taus)


def cmd_verify(args, out, err) -> int:
    grid = _grid(args)
    rows = run_suite(args.suite, grid, _opts(args))
    failed = [r for r in rows if not r.passed]
    payload = {
        "schema": SCHEMA, "suite": args.suite,
        "grid": {"x": [_cx(x) for x in grid.xs], "tau": [_cx(t) for t in grid.taus]},
        "passed": not failed,
        "counts": {s: sum(r.status == s for r in rows) for s in ("pass", "fail", "skip")},
        "rows": [r.as_dict() for r in rows],
    }
    _emit(payload, payload["rows"], args.format or "json", out)
    for r in failed:
        err.write(f"FAIL {r.suite}/{r.check}: {r.label} at {r.point}: residual {r.residual:.3e} > budget {r.budget:.1e}\n")
    return EXIT_VERIFY_FAILED if failed else 0


def cmd_table(args, out, err) -> int:
    spec = parse_function(args.function)
    opts = _opts(args)
    flag = spec.name in POLE_FUNCTIONS
    rows = []
    for x in args.x:
        row = {"x_re": float(x), "x_im": 0.0}
        try:
            v = evaluate(spec, x, args.tau, method=args.method, order=args.order,
                         reduce_first=not args.no_reduce, opts=opts).value
            row.update(re=v.real, im=v.imag)
            if flag:
                row["pole"] = 0
        except PoleError:
            if not flag:
                raise
            row.update(re=None, im=None, pole=1)
        rows.append(row)
    payload = {"schema": SCHEMA, "function": args.function, "tau": _cx(args.tau), "rows": rows}
    _emit(payload, rows, args.format or "csv", out)
    return 0


# parser -------------------------------------------------------------------------

def _global_flags(p, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--rel-tol", type=float, default=d(1e-15), help="series truncation tolerance")
    p.add_argument("--max-terms", type=int, default=d(512), help="term budget per series")
    p.add_argument("--format", choices=("json", "csv"), default=d(None),
                   help="output format (json, or csv for table)")
    p.add_argument("--no-reduce", action="store_true", default=d(False),
                   help="evaluate q-series at the given tau without reduction")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ellipticore", description="Theta and Weierstrass functions with verification suites.")
    _global_flags(p, suppress=False)
    sub = p.add_subparsers(dest="command", required=True)
    common = _Parser(add_help=False)
    _global_flags(common, suppress=True)

    e = sub.add_parser("eval", parents=[common], help="evaluate a function")
    e.add_argument("function", help=f"one of {', '.join(FUNCTIONS)}")
    e.add_argument("--x", type=complex_literal, default=0j)
    e.add_argument("--tau", type=complex_literal, required=True)
    e.add_argument("--method", choices=METHODS, default="q")
    e.add_argument("--order", type=int, default=18)
    e.set_defaults(run=cmd_eval)

    r = sub.add_parser("reduce", parents=[common], help="reduce tau to the fundamental domain")
    r.add_argument("--tau", type=complex_literal, required=True)
    r.set_defaults(run=cmd_reduce)

    x = sub.add_parser("expand", parents=[common], help="series coefficients or recurrence tables")
    x.add_argument("function", help="sigma, sigma1..3, theta1..4, theta[a,b] or " + ", ".join(TABLE_FAMILIES))
    x.add_argument("--order", type=int, default=4)
    x.add_argument("--representation", choices=("g", "e", "theta"), default=None)
    x.set_defaults(run=cmd_expand)

    v = sub.add_parser("verify", parents=[common], help="run residual suites")
    v.add_argument("suite", choices=SUITES + ("all",))
    v.add_argument("--grid", choices=("default", "fundamental"), default="default")
    v.add_argument("--x-points", type=complex_list, default=None, help="comma-separated x values")
    v.add_argument("--tau-points", type=complex_list, default=None, help="comma-separated tau values")
    v.set_defaults(run=cmd_verify)

    t = sub.add_parser("table", parents=[common], help="tabulate along a real x range")
    t.add_argument("function")
    t.add_argument("--x", type=real_range, required=True, help="start:stop:step")
    t.add_argument("--tau", type=complex_literal, required=True)
    t.add_argument("--method", choices=METHODS, default="q")
    t.add_argument("--order", type=int, default=18)
    t.set_defaults(run=cmd_table)
    return p


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # --help, or a usage error (64)
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if args.command in ("expand",) and args.order < 0:
        err.write("error: order must be >= 0\n")
        return DomainError.exit_code
    try:
        return args.run(args, out, err)
    except EllipticError as exc:
        err.write(f"error: {exc}\n")
        return exc.exit_code


__all__ = ["main", "build_parser", "complex_literal", "real_range", "SCHEMA"]
