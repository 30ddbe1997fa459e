"""Command-line front end.

Exit status: 0 when every case passes, 1 on a verification failure, 2 on a
usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from typing import Sequence

import mpmath

from . import __version__
from .errors import ReflCheckError
from .scalar import format_rational, parse_rational
from .suites import CaseResult, SuiteConfig, SuiteReport, SUITES, emit_report, expand_suite, run_specs

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def parse_ids(text: str) -> tuple[int, ...]:
    """``"1..45"``, ``"3"``, ``"1,4-6,10..12"``."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        sep = ".." if ".." in part else "-" if "-" in part[1:] else None
        try:
            if sep:
                lo, hi = part.split(sep, 1)
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
        except ValueError:
            raise UsageError(f"cannot parse relation ids {text!r}") from None
    if not out or any(not 1 <= i <= 45 for i in out):
        raise UsageError(f"relation ids must lie in 1..45, got {text!r}")
    return tuple(dict.fromkeys(out))


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except (ValueError, ReflCheckError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _globals() -> argparse.ArgumentParser:
    g = argparse.ArgumentParser(add_help=False)
    g.add_argument("--seed", type=int, default=0, help="sampling seed")
    g.add_argument("--jobs", type=int, default=1, help="worker processes")
    g.add_argument("--format", choices=("json", "text"), default="json")
    g.add_argument("--digits", type=int, default=40, help="precision for approximate evaluation")
    g.add_argument("--output", "-o", help="also write the report to this file")
    return g


def build_parser() -> argparse.ArgumentParser:
    common = _globals()
    p = argparse.ArgumentParser(prog="reflcheck", description="Exact verification of reflection-algebra and 3F2 identities.")
    p.add_argument("--version", action="version", version=f"reflcheck {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", parents=[common], help="run a verification suite")
    run.add_argument("suite", choices=[*SUITES, "all"])
    run.add_argument("--samples", type=int, default=20, help="exact samples per relation")
    run.add_argument("--approx-samples", type=int, default=10, help="convergent samples per relation")
    run.add_argument("--ids", default="1..45", help="relation ids, e.g. 1..45 or 1,3,5-9")
    run.add_argument("--triples", type=int, default=5, help="random (a,d,e) triples per realization suite")
    run.add_argument("--bound", type=int, default=12, help="bound on sampled numerators and denominators")
    run.add_argument("--rules", help="JSON rule system for the diamond suite")

    ev = sub.add_parser("eval", help="evaluate a function")
    ev_sub = ev.add_subparsers(dest="what", required=True)
    f32 = ev_sub.add_parser("3f2", parents=[common], help="3F2(a,b,c;d,e;1)")
    f32.add_argument("--params", required=True, help="a,b,c,d,e as p/q")
    f32.add_argument("--mode", choices=("exact", "approx"), default="exact")

    ver = sub.add_parser("verify", help="check one identity family")
    v_sub = ver.add_subparsers(dest="what", required=True)
    vr = v_sub.add_parser("relations", parents=[common], help="contiguity relations on random samples")
    vr.add_argument("--ids", default="1..45")
    vr.add_argument("--samples", type=int, default=20)
    vr.add_argument("--approx-samples", type=int, default=0)

    vl = v_sub.add_parser("ladder", parents=[common], help="one ladder identity at one point")
    vl.add_argument("--which", required=True, help="down-minus, up-minus, down-plus, up-plus (or 1..4)")
    for name in ("a", "d", "e", "u", "x"):
        vl.add_argument(f"--{name}", type=_rational, required=True)

    vh = v_sub.add_parser("hahn", parents=[common], help="Hahn polynomial checks")
    vh.add_argument("--n", type=int, required=True)
    vh.add_argument("--alpha", type=_rational, required=True)
    vh.add_argument("--beta", type=_rational, required=True)
    vh.add_argument("--N", type=int, required=True)
    vh.add_argument("--check", choices=("difference-eq", "ladder", "orthogonality"), default="difference-eq")

    sub.add_parser("relation-table", parents=[common], help="print the relation id table")
    return p


def _config(args, **over) -> SuiteConfig:
    base = dict(seed=args.seed, jobs=args.jobs, digits=args.digits)
    base.update(over)
    try:
        return SuiteConfig(**base)
    except ReflCheckError as exc:
        raise UsageError(str(exc)) from None


def _single(suite: str, case_id: str, params: dict, fn) -> SuiteReport:
    t0 = time.perf_counter()
    try:
        ok, sample = fn()
    except ReflCheckError as exc:
        ok, sample = False, f"{type(exc).__name__}: {exc}"
    return SuiteReport(suite, [CaseResult(case_id, params, ok, sample, int((time.perf_counter() - t0) * 1000))])


def _cmd_run(args) -> SuiteReport:
    rules = None
    if args.rules:
        try:
            with open(args.rules) as fh:
                rules = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read rules file: {exc}") from None
    cfg = _config(
        args,
        samples=args.samples,
        approx_samples=args.approx_samples,
        ids=parse_ids(args.ids),
        triples=args.triples,
        bound=args.bound,
        rules=rules,
    )
    try:
        specs = expand_suite(args.suite, cfg)
    except ReflCheckError as exc:
        raise UsageError(str(exc)) from None
    return run_specs(args.suite, specs, cfg)


def _cmd_eval(args) -> SuiteReport:
    from .hyper import HypPoint, eval_3f2

    try:
        params = tuple(parse_rational(t) for t in args.params.split(","))
    except (ValueError, ReflCheckError, ZeroDivisionError):
        raise UsageError(f"cannot parse --params {args.params!r}") from None
    if len(params) != 5:
        raise UsageError("--params needs five values a,b,c,d,e")
    p = HypPoint.of(params, args.mode, args.digits)

    def run():
        v = eval_3f2(p)
        if args.mode == "exact":
            return True, format_rational(v)
        with mpmath.workdps(args.digits + 15):
            return True, f"{mpmath.nstr(v.value, args.digits)} +- {mpmath.nstr(v.error_bound, 3)}"

    ps = {k: format_rational(v) for k, v in zip("abcde", params)}
    ps["mode"] = args.mode
    return _single("eval-3f2", "3f2", ps, run)


def _cmd_verify(args) -> SuiteReport:
    if args.what == "relations":
        cfg = _config(args, samples=args.samples, approx_samples=args.approx_samples, ids=parse_ids(args.ids))
        return run_specs("relations45", expand_suite("relations45", cfg), cfg)
    if args.what == "ladder":
        from .hyper import LadderFamily, ladder_residual

        params = {k: format_rational(getattr(args, k)) for k in ("a", "d", "e", "u", "x")}
        params["which"] = args.which

        def run():
            off = args.u - args.a
            if off.denominator != 1 or off < 0:
                raise UsageError("u - a must be a non-negative integer for a terminating family")
            x = int(args.x)
            fam = LadderFamily(args.a, args.d, args.e, x - 1, x + 1, count=int(off) + 2)
            r = ladder_residual(args.which, fam, args.u, args.x)
            return r == 0, format_rational(r)

        return _single("ladder", str(args.which), params, run)
    from .hyper import HahnParams, hahn_residuals

    try:
        h = HahnParams(args.n, args.alpha, args.beta, args.N)
    except ReflCheckError as exc:
        raise UsageError(str(exc)) from None
    params = {"n": args.n, "alpha": format_rational(args.alpha), "beta": format_rational(args.beta), "N": args.N, "check": args.check}

    def run():
        res = hahn_residuals(h, args.check)
        bad = [r for r in res if r != 0]
        return not bad, format_rational(bad[0]) if bad else "0"

    return _single("hahn", args.check, params, run)


def _relation_table() -> SuiteReport:
    from .hyper import relation_ids, relation_label

    cases = [CaseResult(f"relation/{i}", {"id": i, "label": relation_label(i)}, True, "0", 0) for i in relation_ids()]
    return SuiteReport("relation-table", cases)


def _glue_params(argv: list[str]) -> list[str]:
    # "--params -2,1,1,2,2" would otherwise be read as an unknown option
    out = []
    it = iter(argv)
    for tok in it:
        if tok == "--params":
            nxt = next(it, None)
            out.append(tok if nxt is None else f"--params={nxt}")
        else:
            out.append(tok)
    return out


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = _glue_params(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        if args.jobs < 1:
            raise UsageError("--jobs must be at least 1")
        if args.command == "run":
            report = _cmd_run(args)
        elif args.command == "eval":
            report = _cmd_eval(args)
        elif args.command == "verify":
            report = _cmd_verify(args)
        else:
            report = _relation_table()
        if args.command != "run":
            report.seed = args.seed
    except UsageError as exc:
        print(f"reflcheck: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ReflCheckError as exc:
        print(f"reflcheck: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = emit_report(report, args.format)
    print(text)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(emit_report(report, "json") + "\n")
    return EXIT_OK if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
