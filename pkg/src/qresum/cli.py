"""Command-line entry point: ``qresum {eval,check,sweep,verify-all}``.

Exit codes: 0 success, 1 usage or domain error (or failed identity), 2 a
truncated sum that did not converge.  Complex literals are ``re,im`` or a
plain decimal; write negative values as ``--x=-0.5,0.2``.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import Any, Callable, Sequence

from . import connection, resummation, verify
from .errors import ConfigError, DomainError, MaxTermsExceeded, QSeriesError
from .qcore import QContext, SeriesSpec, TruncatedValue, phi_series, psi_series, qpochhammer, qpochhammer_inf, theta
from .resummation import Psi1Params, SpiralSpec

EXIT_OK, EXIT_USAGE, EXIT_NOT_CONVERGED = 0, 1, 2


class UsageError(Exception):
    pass


def complex_literal(text: str) -> complex:
    try:
        return verify.parse_complex(text.strip())
    except ConfigError:
        raise argparse.ArgumentTypeError(f"malformed complex literal {text!r} (use 're,im' or a decimal)") from None


def _fmt_real(x: Any, digits: int) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    import mpmath

    return mpmath.nstr(x, digits, min_fixed=-math.inf, max_fixed=math.inf)


def format_value(v: Any, ctx: QContext) -> str:
    """``re+imj``, a form ``complex()`` parses back at machine precision."""
    digits = max(17, int(ctx.precision_bits * math.log10(2)) + 2)
    re, im = _fmt_real(v.real, digits), _fmt_real(v.imag, digits)
    if not im.startswith("-"):
        im = "+" + im
    return f"{re}{im}j"


# --- eval -----------------------------------------------------------------------


def _need(args: argparse.Namespace, *names: str) -> list[Any]:
    missing = [n for n in names if getattr(args, n) in (None, [])]
    if missing:
        flags = ", ".join("--" + ("lambda" if n == "lam" else n.replace("_", "-")) for n in missing)
        raise UsageError(f"{args.function} needs {flags}")
    return [getattr(args, n) for n in names]


def _one(values: list[complex], flag: str) -> complex:
    if len(values) != 1:
        raise UsageError(f"--{flag} takes a single value here")
    return values[0]


def _psi1(args: argparse.Namespace) -> Psi1Params:
    return Psi1Params(*_need(args, "a1", "a2", "b1"))


def _ev_theta(a, ctx):
    (x,) = _need(a, "x")
    return theta(x, ctx)


def _ev_qpochhammer(a, ctx):
    (alist,) = _need(a, "a")
    base = _one(alist, "a")
    if a.n is None:
        return qpochhammer_inf(base, ctx)
    return qpochhammer(base, ctx, a.n)


def _ev_phi(a, ctx):
    (x,) = _need(a, "x")
    return phi_series(SeriesSpec.phi(a.a or [], a.b or []), ctx, x)


def _ev_psi(a, ctx):
    (x,) = _need(a, "x")
    return psi_series(SeriesSpec.psi(a.a or [], a.b or []), ctx, x)


def _ev_psi2x1(a, ctx):
    raise UsageError(
        "the 2psi1 series diverges around the origin (its coefficients grow like q^(-n(n-1)/2)); "
        "evaluate its q-Borel-Laplace resummation with 'eval resum2psi1' instead"
    )


def _ev_resum(a, ctx):
    (lam, x) = _need(a, "lam", "x")
    return resummation.resum_2psi1(_psi1(a), SpiralSpec(lam, ctx), x)


def _ev_borel(a, ctx):
    (x,) = _need(a, "x")
    return resummation.borel_image_2psi2(_psi1(a), ctx, x)


def _ev_v(which):
    def run(a, ctx):
        (x,) = _need(a, "x")
        return connection.v_solution(_psi1(a), ctx, which, x)

    return run


def _ev_c(which):
    def run(a, ctx):
        (lam, x) = _need(a, "lam", "x")
        spec = connection.ConnectionCoefficientSpec(_psi1(a), SpiralSpec(lam, ctx), which)
        return connection.connection_coefficient(spec, x)

    return run


def _ev_main_rhs(a, ctx):
    (lam, x) = _need(a, "lam", "x")
    return connection.main_theorem_rhs(_psi1(a), SpiralSpec(lam, ctx), x)


def _ev_watson(a, ctx):
    (al, bl, c, x) = _need(a, "a", "b", "c", "x")
    return connection.watson_rhs(_one(al, "a"), _one(bl, "b"), c, ctx, x)


def _ev_ramanujan(a, ctx):
    (al, bl, x) = _need(a, "a", "b", "x")
    return connection.ramanujan_product(_one(al, "a"), _one(bl, "b"), ctx, x)


def _ev_slater(a, ctx):
    (al, bl, x) = _need(a, "a", "b", "x")
    if a.r is not None and not a.r == len(al) == len(bl):
        raise UsageError(f"--r {a.r} does not match {len(al)} --a and {len(bl)} --b values")
    return connection.slater_rhs(connection.SlaterParams(al, bl), ctx, x)


def _ev_corollary(a, ctx):
    (x,) = _need(a, "x")
    return connection.corollary_2psi2_rhs(_psi1(a), ctx, x)


EVAL_FUNCTIONS: dict[str, Callable[[argparse.Namespace, QContext], Any]] = {
    "theta": _ev_theta,
    "qpochhammer": _ev_qpochhammer,
    "phi": _ev_phi,
    "psi": _ev_psi,
    "psi2x1": _ev_psi2x1,
    "resum2psi1": _ev_resum,
    "borel2psi2": _ev_borel,
    "v1": _ev_v(1),
    "v2": _ev_v(2),
    "c1": _ev_c(1),
    "c2": _ev_c(2),
    "main_rhs": _ev_main_rhs,
    "watson": _ev_watson,
    "ramanujan": _ev_ramanujan,
    "slater": _ev_slater,
    "corollary": _ev_corollary,
}


def _context(args: argparse.Namespace) -> QContext:
    if args.q is None:
        raise UsageError("--q is required")
    try:
        return QContext(args.q, precision_bits=args.precision)
    except ConfigError as exc:
        raise UsageError(str(exc)) from None


def cmd_eval(args: argparse.Namespace, out) -> int:
    ctx = _context(args)
    result = EVAL_FUNCTIONS[args.function](args, ctx)
    if isinstance(result, TruncatedValue):
        print(f"value={format_value(ctx.num(result.value), ctx)}", file=out)
        print(f"converged={str(result.converged).lower()}", file=out)
        print(f"terms_pos={result.terms_used_pos}", file=out)
        print(f"terms_neg={result.terms_used_neg}", file=out)
        print(f"last_term={float(abs(result.last_term_mag)):.3e}", file=out)
        if result.note:
            print(f"warning={result.note}", file=out)
        return EXIT_OK if result.converged else EXIT_NOT_CONVERGED
    print(f"value={format_value(ctx.num(result), ctx)}", file=out)
    print("converged=true", file=out)
    return EXIT_OK


# --- check / sweep / verify-all -------------------------------------------------


def _point_from_args(identity: verify.Identity, args: argparse.Namespace) -> dict:
    p: dict[str, Any] = {}

    def put(key: str, value: Any) -> None:
        if value is not None:
            p[key] = [value.real, value.imag] if isinstance(value, complex) else value

    put("q", args.q)
    for key in ("a1", "a2", "b1", "c", "x"):
        put(key, getattr(args, key))
    put("lam", args.lam)
    if identity is verify.Identity.SLATER_R:
        p["a"] = [[v.real, v.imag] for v in args.a or []]
        p["b"] = [[v.real, v.imag] for v in args.b or []]
    else:
        if args.a:
            put("a", _one(args.a, "a"))
        if args.b:
            put("b", _one(args.b, "b"))
    if identity is verify.Identity.RAMANUJAN and "x" in p:
        p["z"] = p.pop("x")
    if args.n is not None:
        p["k"] = args.n
        p["which"] = args.n
    if args.function_name:
        p["function" if identity is verify.Identity.QDE_RESIDUAL else "f"] = args.function_name
    return p


def _record_lines(rec: verify.PointRecord) -> list[str]:
    lines = [f"status={rec.status}"]
    if rec.rel_residual is not None:
        lines += [f"rel_residual={rec.rel_residual:.3e}", f"abs_residual={rec.abs_residual:.3e}",
                  f"converged={str(rec.converged).lower()}"]
    if rec.reason:
        lines.append(f"reason={rec.reason}")
    return lines


def cmd_check(args: argparse.Namespace, out) -> int:
    identity = verify.Identity(args.identity)
    tol = args.tolerance if args.tolerance is not None else verify.DEFAULT_TOLERANCE[identity]
    point = _point_from_args(identity, args)
    try:
        rec = verify.evaluate_point(identity, point, 0, tol, args.precision)
    except ConfigError as exc:
        raise UsageError(str(exc)) from None
    if rec.lhs is not None and identity is not verify.Identity.QDE_RESIDUAL:
        print(f"lhs={format_value(complex(*rec.lhs), QContext(0.5))}", file=out)
        print(f"rhs={format_value(complex(*rec.rhs), QContext(0.5))}", file=out)
    for line in _record_lines(rec):
        print(line, file=out)
    if rec.status == "pass":
        return EXIT_OK
    if rec.converged is False:
        return EXIT_NOT_CONVERGED
    return EXIT_USAGE


def _report_line(report: verify.SweepReport) -> str:
    c = report.counts
    return (f"{report.identity}: pass={c['pass']} skip={c['skip']} fail={c['fail']} "
            f"max_rel_residual={report.max_rel_residual:.3e} tol={report.tolerance:.1e}")


def _print_failures(report: verify.SweepReport, out) -> None:
    for rec in report.records:
        if rec.status == "fail":
            res = "n/a" if rec.rel_residual is None else f"{rec.rel_residual:.3e}"
            print(f"  fail index={rec.index} rel_residual={res} reason={rec.reason}", file=out)


def cmd_sweep(args: argparse.Namespace, out) -> int:
    config = verify.SweepConfig.load(args.config)
    if args.tolerance is not None:
        config.tolerance = args.tolerance
    if args.seed is not None:
        config.seed = args.seed
    if args.precision != 53:
        config.precision_bits = args.precision
    report = verify.run_sweep(config)
    if args.out:
        verify.write_report(report, args.format, args.out)
    print(_report_line(report), file=out)
    _print_failures(report, out)
    return EXIT_OK if report.ok else EXIT_USAGE


def cmd_verify_all(args: argparse.Namespace, out) -> int:
    outdir = Path(args.out or "reports")
    outdir.mkdir(parents=True, exist_ok=True)
    seed = args.seed if args.seed is not None else 0
    failed = []
    for report in verify.verify_all(seed=seed, tolerance=args.tolerance, precision_bits=args.precision):
        verify.write_report(report, args.format, outdir / f"{report.identity}.{args.format}")
        print(_report_line(report), file=out)
        _print_failures(report, out)
        if not report.ok:
            failed.append(report.identity)
    if failed:
        print(f"{len(failed)} identities fail: {', '.join(failed)}", file=out)
        return EXIT_USAGE
    print("all identities pass", file=out)
    return EXIT_OK


# --- parser -------------------------------------------------------------------------


def _params(p: argparse.ArgumentParser) -> None:
    c = complex_literal
    p.add_argument("--q", type=c)
    p.add_argument("--a1", type=c)
    p.add_argument("--a2", type=c)
    p.add_argument("--b1", type=c)
    p.add_argument("--lambda", dest="lam", type=c)
    p.add_argument("--x", type=c)
    p.add_argument("--c", type=c)
    p.add_argument("--a", type=c, action="append", help="repeat for a list")
    p.add_argument("--b", type=c, action="append", help="repeat for a list")
    p.add_argument("--r", type=int, help="slater order; must match the --a/--b counts")
    p.add_argument("--n", type=int, help="Pochhammer length, theta shift k or coefficient index")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--precision", type=int, default=53, help="working precision in bits (default 53)")
    p.add_argument("--tolerance", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qresum", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="evaluate a function at a point")
    ev.add_argument("function", choices=sorted(EVAL_FUNCTIONS))
    _params(ev)
    _common(ev)

    ck = sub.add_parser("check", help="check one identity at one point")
    ck.add_argument("identity", choices=[i.value for i in verify.Identity])
    ck.add_argument("--function", dest="function_name", help="target for qde_residual / roundtrip")
    _params(ck)
    _common(ck)

    sw = sub.add_parser("sweep", help="run a sweep from a json config")
    sw.add_argument("config")
    sw.add_argument("--out")
    sw.add_argument("--format", choices=["json", "csv"], default="json")
    sw.add_argument("--seed", type=int)
    _common(sw)

    va = sub.add_parser("verify-all", help="run every identity on its default grid")
    va.add_argument("--out", help="report directory (default ./reports)")
    va.add_argument("--format", choices=["json", "csv"], default="json")
    va.add_argument("--seed", type=int)
    _common(va)
    return parser


COMMANDS = {"eval": cmd_eval, "check": cmd_check, "sweep": cmd_sweep, "verify-all": cmd_verify_all}


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.tolerance is not None and not args.tolerance > 0:
        print("error: --tolerance must be positive", file=err)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"usage error: {exc}", file=err)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"config error: {exc}", file=err)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"domain error: {type(exc).__name__}: {exc}", file=err)
        return EXIT_USAGE
    except MaxTermsExceeded as exc:
        side = f" side={exc.side}" if exc.side else ""
        print(f"not converged:{side} {exc}", file=err)
        return EXIT_NOT_CONVERGED
    except QSeriesError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    except OSError as exc:
        print(f"io error: {exc}", file=err)
        return EXIT_USAGE


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
