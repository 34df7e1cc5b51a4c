"""Command-line front end: ``lame-accessory {monodromy,solve,verify,identify}``.

Machine-readable JSON goes to stdout, a short human summary to stderr.

Exit codes
    0  success
    2  bad input (unparsable value, missing file, digits below the minimum)
    3  numeric failure (invariants not met, precision exhausted)
    4  no sign-changing bracket for the real search
    5  complex search stalled
    6  catalog verification failed for a non-flagged entry
"""
from __future__ import annotations

import argparse
import ast
import json
import os
import re
import sys
import time
from dataclasses import dataclass, field, replace

import gmpy2
from gmpy2 import mpc, mpfr

from . import __version__
from .algebraic import format_poly, identify
from .catalog import UNVERIFIED, CatalogEntry, fricke_check, load_catalog, verify_entry
from .curve import depress, load_curve
from .errors import DegenerateCubic, LameError, NoBracket, SchemaError, Stalled
from .lame import LameOperator, truncation_order_for
from .monodromy import monodromy_set
from .paths import build_loops
from .precision import MIN_DIGITS, PrecisionContext, to_big, to_string
from .solver import SolverConfig, solve_and_identify

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_NOBRACKET, EXIT_STALLED, EXIT_VERIFY = 0, 2, 3, 4, 5, 6
DEFAULT_DIGITS = 40
DIGITS_ENV = "LAME_DEFAULT_DIGITS"


class InputError(Exception):
    pass


@dataclass
class RunReport:
    command: str
    inputs: dict
    context: dict
    result: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    exit_code: int = 0

    def to_json(self):
        return {"command": self.command, "inputs": self.inputs, "context": self.context,
                "result": self.result, "timings": self.timings, "exit_code": self.exit_code}

    @classmethod
    def from_json(cls, data):
        return cls(data["command"], data["inputs"], data["context"], data.get("result", {}),
                   data.get("timings", {}), data.get("exit_code", 0))

    def dumps(self):
        return json.dumps(self.to_json(), indent=2, sort_keys=True, ensure_ascii=False)


# ---------------------------------------------------------------------------
# value expressions

def _principal_sqrt(z):
    # -mpc(2, 0) carries a negative zero imaginary part, which lands on the other side of the cut
    if z.imag == 0:
        z = mpc(z.real, 0)
    return gmpy2.sqrt(z)


_FUNCS = {
    "sqrt": _principal_sqrt,
    "cos": lambda z: gmpy2.cos(z),
    "sin": lambda z: gmpy2.sin(z),
    "exp": lambda z: gmpy2.exp(z),
    "log": lambda z: gmpy2.log(mpc(z.real, 0) if z.imag == 0 else z),
}
_SERIALIZED = re.compile(r"\s*[^@]+?@\s*\d+\s*(?:,|$)")
_NUMBER = re.compile(r"(\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")


def _literal(text, bits):
    text = text.replace("_", "")
    if text[-1] in "jJ":
        return mpc(0, mpfr(text[:-1] or "1", bits))
    return mpc(mpfr(text, bits), 0)


def _eval_node(node, source, ctx):
    if isinstance(node, ast.Expression):
        return _eval_node(node.body, source, ctx)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)) \
            and not isinstance(node.value, bool):
        if isinstance(node.value, int):
            return mpc(node.value)
        # re-read the literal so digits beyond double precision survive
        return _literal(ast.get_source_segment(source, node), ctx.bits)
    if isinstance(node, ast.Name):
        if node.id == "pi":
            return mpc(gmpy2.const_pi())
        if node.id in ("I", "i"):
            return mpc(0, 1)
        raise InputError(f"unknown name {node.id!r}")
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.UAdd, ast.USub)):
        v = _eval_node(node.operand, source, ctx)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp):
        a, b = _eval_node(node.left, source, ctx), _eval_node(node.right, source, ctx)
        if isinstance(node.op, ast.Add):
            return a + b
        if isinstance(node.op, ast.Sub):
            return a - b
        if isinstance(node.op, ast.Mult):
            return a * b
        if isinstance(node.op, ast.Div):
            if b == 0:
                raise InputError("division by zero")
            return a / b
        if isinstance(node.op, ast.Pow):
            if b.imag == 0 and b.real == int(b.real) and abs(b.real) <= 64:
                if b.real < 0 and a == 0:
                    raise InputError("division by zero")
                return a ** int(b.real)
            return a ** b
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS \
            and len(node.args) == 1 and not node.keywords:
        return _FUNCS[node.func.id](_eval_node(node.args[0], source, ctx))
    raise InputError(f"unsupported expression {ast.get_source_segment(source, node)!r}")


def parse_values(text: str, ctx: PrecisionContext):
    """Evaluate a comma-separated list of expressions such as ``"5+2*sqrt(5), (7+3*sqrt(5))/2"``.

    Only numbers, ``+ - * / **``, ``sqrt cos sin exp log``, ``pi`` and
    ``I`` are accepted.  A serialized value ``"re,im@digits"`` is read
    as a single complex number.
    """
    if not isinstance(text, str) or not text.strip():
        raise InputError("empty value")
    if "@" in text:
        # serialized numbers "re[,im]@digits", each one closed by its @digits
        items = [m.group(0).strip().rstrip(",") for m in _SERIALIZED.finditer(text)]
        if "".join(m.group(0) for m in _SERIALIZED.finditer(text)) != text:
            raise InputError(f"cannot parse number list {text!r}")
        try:
            return [to_big(item, ctx) for item in items]
        except ValueError as exc:
            raise InputError(str(exc)) from None
    source = text.strip()
    try:
        tree = ast.parse(source, mode="eval")
    except SyntaxError:
        raise InputError(f"cannot parse {text!r}") from None
    body = tree.body
    nodes = body.elts if isinstance(body, ast.Tuple) else [body]
    with ctx.scope():
        try:
            return [_eval_node(n, source, ctx) for n in nodes]
        except (ValueError, ZeroDivisionError, OverflowError) as exc:
            raise InputError(f"cannot evaluate {text!r}: {exc}") from None


def parse_value(text: str, ctx: PrecisionContext):
    vals = parse_values(text, ctx)
    if len(vals) != 1:
        raise InputError(f"expected one value, got {len(vals)}")
    return vals[0]


def literal_digits(text: str):
    """Most significant digits among the decimal literals of ``text``."""
    best = 0
    for m in _NUMBER.finditer(text):
        mant = m.group(1).replace(".", "").lstrip("0")
        best = max(best, len(mant))
    return best


# ---------------------------------------------------------------------------
# commands


def _context_json(ctx):
    return {"digits": ctx.digits, "guard": ctx.guard, "series_order": ctx.series_order}


def _operator_ctx(curve, e, ctx, step_ratio=0.5):
    base = PrecisionContext(digits=ctx.digits, guard=ctx.guard)
    order = truncation_order_for(LameOperator(depress(curve, base), e, 0), step_ratio, base)
    return replace(base, series_order=order)


def cmd_monodromy(args, ctx):
    t0 = time.perf_counter()
    curve = load_curve(args.curve)
    C = parse_value(args.C, ctx)
    ctx = _operator_ctx(curve, args.e, ctx)
    op = LameOperator(depress(curve, ctx), args.e, C)
    plan = build_loops(op.cubic, ctx=ctx)
    ms = monodromy_set(op, plan, ctx)
    ok = ms.digits_est >= ctx.digits / 2
    report = RunReport("monodromy", {"curve": curve.to_json(), "e": args.e, "C": args.C},
                       _context_json(ctx), {"monodromy": ms.to_json(), "invariants_pass": ok},
                       {"total": round(time.perf_counter() - t0, 3)}, EXIT_OK if ok else EXIT_NUMERIC)
    squares = ", ".join(f"{complex(s).real:.12g}" for s in ms.trace_squares)
    _say(f"trace squares: {squares}")
    _say(f"digits_est {ms.digits_est} of {ctx.digits}: {'invariants pass' if ok else 'INVARIANTS FAIL'}")
    return report


def cmd_solve(args, ctx):
    t0 = time.perf_counter()
    curve = load_curve(args.curve)
    tctx = PrecisionContext(digits=max(60, 8 * ctx.digits), guard=ctx.guard)
    targets = parse_values(args.target, tctx)
    if len(targets) != 3:
        raise InputError(f"--target needs three values, got {len(targets)}")
    with tctx.scope():
        for t in targets:
            if abs(t.imag) > tctx.tolerance() * max(mpfr(1), abs(t)) or not t.real > 0:
                raise InputError(f"target {to_string(t, 15)} is not a positive real")
        targets = tuple(mpc(t.real, 0) for t in targets)
    d = ctx.digits
    config = SolverConfig(ex=args.ex, digits_schedule=(d, 2 * d, 4 * d, 8 * d), guard=ctx.guard)
    entry = CatalogEntry("cli", args.e, curve, None, targets)
    result = solve_and_identify(entry, config, ctx, complex_search=args.complex)
    res = result.to_json()
    timings = res.pop("timings", {})
    timings["total"] = round(time.perf_counter() - t0, 3)
    inputs = {"curve": curve.to_json(), "e": args.e, "target": args.target,
              "complex": bool(args.complex), "ex": args.ex}
    report = RunReport("solve", inputs, _context_json(ctx), res, timings)
    _say(f"C = {to_string(result.C, min(d, 30))}  (digits_est {result.digits_est})")
    _say(f"identified: {res['minpoly_text']}" if "minpoly_text" in res else "identified: not found")
    return report


def _select(entries, label):
    if label is None:
        return entries
    hits = [x for x in entries if label in (x.label, x.key)]
    if not hits:
        raise InputError(f"no catalog entry {label!r}")
    return hits


def cmd_verify(args, ctx):
    t0 = time.perf_counter()
    entries = sorted(_select(load_catalog(args.catalog), args.label), key=lambda x: (x.label, x.e))
    rows, failures = [], []
    for entry in entries:
        t1 = time.perf_counter()
        row = {"label": entry.label, "e": entry.e, "flags": sorted(entry.flags)}
        try:
            fr = fricke_check(entry, ctx)
            row["fricke"] = f"{float(fr):.3e}"
            ok = fr < ctx.tolerance()
            if entry.expected_C is not None:
                ms, rep = verify_entry(entry, ctx)
                row["match"] = rep.to_json()
                row["max_error"] = f"{rep.max_error:.3e}"
                row["digits_est"] = ms.digits_est
                row["trace_squares"] = [to_string(s, 20) for s in ms.trace_squares]
                ok = ok and rep.matched
            row["status"] = "pass" if ok else "fail"
        except LameError as exc:
            row["status"] = "error"
            row["error"] = f"{type(exc).__name__}: {exc}"
            ok = False
        row["seconds"] = round(time.perf_counter() - t1, 3)
        rows.append(row)
        if not ok and entry.verified:
            failures.append(entry.key)
    timings = {r["label"] + f"@e{r['e']}": r.pop("seconds") for r in rows}
    timings["total"] = round(time.perf_counter() - t0, 3)
    result = {"entries": rows, "failures": failures,
              "passed": sum(r["status"] == "pass" for r in rows), "total": len(rows)}
    inputs = {"catalog": args.catalog, "label": args.label}
    report = RunReport("verify", inputs, _context_json(ctx), result, timings,
                       EXIT_VERIFY if failures else EXIT_OK)
    for r in rows:
        mark = "*" if UNVERIFIED in r["flags"] else " "
        _say(f"{r['status']:5s} {mark} {r['label']:>10s} e={r['e']:<2d} fricke={r.get('fricke', '-'):>9s} "
             f"err={r.get('max_error', '-'):>9s}")
    _say(f"{result['passed']}/{len(rows)} pass" + (f"; failing: {', '.join(failures)}" if failures else "")
         + "  (* = unverified transcription, not gated)")
    return report



def cmd_identify(args, ctx):
    t0 = time.perf_counter()
    if args.max_degree < 1:
        raise InputError("--max-degree must be >= 1")
    sig = literal_digits(args.value)
    # a long decimal is a truncated approximation: trust only its own digits
    digits = min(ctx.digits, sig) if sig >= MIN_DIGITS else ctx.digits
    ictx = PrecisionContext(digits=digits, guard=ctx.guard)
    value = parse_value(args.value, ictx)
    h = (digits - 20) // (2 * args.max_degree)
    if h < 1:
        raise InputError(f"{digits} digits are too few for degree {args.max_degree}")
    found = identify(value, args.max_degree, h, ictx)
    result = {"found": found is not None, "max_height_digits": h}
    if found is not None:
        result["minpoly"] = list(found.minpoly)
        result["minpoly_text"] = format_poly(found.minpoly)
        result["degree"] = found.degree
    result["value"] = to_string(value, digits)
    inputs = {"value": args.value, "max_degree": args.max_degree}
    report = RunReport("identify", inputs, {"digits": digits, "guard": ctx.guard}, result,
                       {"total": round(time.perf_counter() - t0, 3)})
    _say(result["minpoly_text"] if found is not None else "not found")
    return report


# ---------------------------------------------------------------------------
# driver


def _say(text):
    print(text, file=sys.stderr)


def _default_digits():
    raw = os.environ.get(DIGITS_ENV)
    if raw is None or not raw.strip():
        return DEFAULT_DIGITS
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"{DIGITS_ENV}={raw!r} is not an integer") from None


def build_parser(default_digits=DEFAULT_DIGITS):
    p = argparse.ArgumentParser(prog="lame-accessory",
                                description="Accessory parameters and monodromy of algebraic Lamé equations.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def digits(sp):
        sp.add_argument("--digits", type=int, default=default_digits,
                        help=f"working decimal digits (default {default_digits}, minimum {MIN_DIGITS})")

    m = sub.add_parser("monodromy", help="monodromy matrices at a given C")
    m.add_argument("--curve", required=True, help="curve JSON file")
    m.add_argument("--e", type=int, required=True, help="ramification index")
    m.add_argument("--C", required=True, help="accessory parameter (expression)")
    digits(m)

    s = sub.add_parser("solve", help="search for C matching a trace-square triple")
    s.add_argument("--curve", required=True, help="curve JSON file")
    s.add_argument("--e", type=int, required=True, help="ramification index")
    s.add_argument("--target", required=True, help='three trace squares, e.g. "5,16,20"')
    s.add_argument("--complex", action="store_true", help="use the complex compass search")
    digits(s)
    s.add_argument("--ex", type=float, default=None, help="stopping threshold for the objective")

    v = sub.add_parser("verify", help="check catalog entries")
    v.add_argument("--catalog", default=None, help="catalog JSON (default: bundled)")
    v.add_argument("--label", default=None, help="label, or label@eN when ambiguous")
    digits(v)

    i = sub.add_parser("identify", help="recognize a number as algebraic")
    i.add_argument("--value", required=True, help="decimal literal or expression")
    i.add_argument("--max-degree", type=int, default=4, help="largest degree tried (default 4)")
    digits(i)
    return p


COMMANDS = {"monodromy": cmd_monodromy, "solve": cmd_solve, "verify": cmd_verify, "identify": cmd_identify}
INPUT_ERRORS = (InputError, SchemaError, DegenerateCubic, FileNotFoundError, IsADirectoryError,
                json.JSONDecodeError, UnicodeDecodeError)


def _fail(command, code, exc):
    report = RunReport(command or "", {}, {}, {"error": {"type": type(exc).__name__, "message": str(exc)}},
                       {}, code)
    print(report.dumps())
    _say(f"error: {exc}")
    return code


VALUE_OPTIONS = ("--C", "--value", "--target")


def _glue_values(argv):
    """``--C -55/54`` would read ``-55/54`` as an option; rewrite it as ``--C=-55/54``."""
    out, it = [], iter(argv)
    for a in it:
        if a in VALUE_OPTIONS:
            nxt = next(it, None)
            out.append(a if nxt is None else f"{a}={nxt}")
        else:
            out.append(a)
    return out


def main(argv=None):
    argv = _glue_values(sys.argv[1:] if argv is None else list(argv))
    try:
        default = _default_digits()
    except InputError as exc:
        return _fail(None, EXIT_INPUT, exc)
    args = build_parser(default).parse_args(argv)
    if args.digits < MIN_DIGITS:
        return _fail(args.command, EXIT_INPUT, InputError(f"--digits must be >= {MIN_DIGITS}, got {args.digits}"))
    ctx = PrecisionContext(digits=args.digits)
    try:
        report = COMMANDS[args.command](args, ctx)
    except INPUT_ERRORS as exc:
        return _fail(args.command, EXIT_INPUT, exc)
    except NoBracket as exc:
        return _fail(args.command, EXIT_NOBRACKET, exc)
    except Stalled as exc:
        return _fail(args.command, EXIT_STALLED, exc)
    except (LameError, ArithmeticError) as exc:
        return _fail(args.command, EXIT_NUMERIC, exc)
    print(report.dumps())
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
