"""Command-line driver.

Exit codes: 0 pass, 1 identity failure, 2 usage or input error, 3 MC obstruction.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from typing import Callable, Optional, Sequence

from . import __version__
from .cartan import DiffForm, MultiVector, contract, de_rham_d, mv_wedge, schouten
from .ce import phi_homogeneous
from .deligne import NilpotentDGLA, bch, gauge_action, is_mc
from .hochschild import MultiDiffOp, cup, gerstenhaber_bracket, hkr, hochschild_delta, mdo_eval
from .kernel import ArtinRing, Poly
from .linfty import mc_residual, mc_solve, problem_from_json
from .serial import encode
from .suites import SUITES, ConfigError, SuiteConfig, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_OBSTRUCTED = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False)


def _emit(payload: dict, text: str, fmt: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(_dump(payload) + "\n")
    print(_dump(payload) if fmt == "json" else text)


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            raw = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON in {path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _parse_literal(text: str):
    if text.startswith("@"):
        return _load_json(text[1:])
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON argument at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _resolve_seed(seed: Optional[int]) -> int:
    if seed is not None:
        return seed
    env = os.environ.get("GERBEFLOW_SEED")
    if env is None or env == "":
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"GERBEFLOW_SEED must be an integer, got {env!r}") from None


# ---------------------------------------------------------------------------
# suite / deligne verify


def _suite_config(args, suite: str) -> SuiteConfig:
    return SuiteConfig(
        suite=suite, dim=args.dim, max_deg=args.max_deg, mv_deg=args.mv_deg, trials=args.trials,
        seed=_resolve_seed(args.seed), order=args.order, span_deg=args.span_deg, tuples=args.tuples,
        negative_control=args.negative_control,
    )


def _run_suite_cmd(args, suite: str, command: str) -> int:
    try:
        cfg = _suite_config(args, suite)
        report = run_suite(cfg, command=command)
    except ConfigError as exc:
        raise UsageError(str(exc)) from None
    _emit(report.to_json(), report.to_text(), args.format, args.out)
    return report.exit_code()


def cmd_suite(args) -> int:
    name = args.suite or args.name
    if not name:
        raise UsageError(f"no suite given; choose from {', '.join(SUITES)}")
    if args.suite and args.name and args.suite != args.name:
        raise UsageError("suite given twice with different names")
    return _run_suite_cmd(args, name, f"suite {name}")


def cmd_deligne(args) -> int:
    return _run_suite_cmd(args, "deligne", "deligne verify")


# ---------------------------------------------------------------------------
# mc check / solve


def cmd_mc(args) -> int:
    data = _load_json(args.file)
    start = time.perf_counter()
    try:
        L, pi1, max_order = problem_from_json(data)
        if args.mode == "solve":
            sol = mc_solve(L, pi1, max_order, degree_cap=args.degree_cap)
            result = sol.to_json()
            code = EXIT_OK if sol.solved else EXIT_OBSTRUCTED
        else:
            ring = L.ring
            if data.get("pi") is not None:
                pi = MultiVector.from_json(data["pi"], ring)
            else:
                pi = pi1.scale(Poly.hbar(L.num_vars, ring))
            res = mc_residual(L, pi).truncate(max_order)
            if res:
                first = res.h_valuation()
                result = {"status": "residual-nonzero", "order": first, "pi": pi.to_json(),
                          "residual": res.to_json()}
                code = EXIT_FAIL
            else:
                result = {"status": "solved", "order": max_order, "pi": pi.to_json(),
                          "residual": res.to_json()}
                code = EXIT_OK
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"invalid MC problem in {args.file}: {exc}") from None
    report = {
        "command": f"mc {args.mode}",
        "config": {"file": args.file, "maxOrder": max_order, "degreeCap": args.degree_cap},
        "result": result,
        "elapsed_ms": int((time.perf_counter() - start) * 1000),
        "version": __version__,
    }
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(_dump(result) + "\n")
    if args.format == "json":
        print(_dump(report))
    else:
        print(f"mc {args.mode}: {result['status']} at order {result['order']}")
        print(f"  pi = {MultiVector.from_json(result['pi'], L.ring).to_str()}")
        print(f"  residual = {MultiVector.from_json(result['residual'], L.ring).to_str()}")
    return code


# ---------------------------------------------------------------------------
# eval


def _ring(args) -> ArtinRing:
    return ArtinRing(order=args.order)


def _as(kind: str, data, ring: ArtinRing):
    if isinstance(data, dict) and "type" in data and "value" in data:
        data = data["value"]
    if kind == "mv":
        return MultiVector.from_json(data, ring)
    if kind == "form":
        return DiffForm.from_json(data, ring)
    if kind == "mdo":
        return MultiDiffOp.from_json(data, ring)
    if kind == "poly":
        return Poly.from_json(data, ring)
    raise AssertionError(kind)


def _phi_eval(omega, *mvs):
    return phi_homogeneous(omega)(*mvs)


def _mdo_apply(D, *polys):
    return mdo_eval(D, list(polys))


# name -> (argument kinds, function); "mv*" means any number of trailing multivectors
EVAL_OPS: dict[str, tuple[tuple[str, ...], Callable]] = {
    "schouten": (("mv", "mv"), schouten),
    "wedge": (("mv", "mv"), mv_wedge),
    "d": (("form",), de_rham_d),
    "contract": (("form", "mv"), contract),
    "phi": (("form", "mv*"), _phi_eval),
    "hkr": (("mv",), hkr),
    "delta": (("mdo",), hochschild_delta),
    "bracket": (("mdo", "mdo"), gerstenhaber_bracket),
    "cup": (("mdo", "mdo"), cup),
    "apply": (("mdo", "poly*"), _mdo_apply),
    "is-mc": (("mv",), None),
    "bch": (("mv", "mv"), None),
    "gauge": (("mv", "mv"), None),
}


def cmd_eval(args) -> int:
    if args.op not in EVAL_OPS:
        raise UsageError(f"unknown op {args.op!r}; choose from {', '.join(EVAL_OPS)}")
    kinds, fn = EVAL_OPS[args.op]
    ring = _ring(args)
    raw = [_parse_literal(t) for t in args.operands]
    fixed = [k for k in kinds if not k.endswith("*")]
    star = next((k[:-1] for k in kinds if k.endswith("*")), None)
    if len(raw) < len(fixed) or (star is None and len(raw) != len(fixed)):
        raise UsageError(f"{args.op} takes {len(fixed)}{'+' if star else ''} operands, got {len(raw)}")
    try:
        vals = [_as(k, r, ring) for k, r in zip(fixed, raw)]
        vals += [_as(star, r, ring) for r in raw[len(fixed):]]
        if fn is None:
            g = NilpotentDGLA(vals[0].num_vars, ring)
            if args.op == "is-mc":
                result = is_mc(g, vals[0])
            elif args.op == "bch":
                result = bch(g, vals[0], vals[1])
            else:
                result = gauge_action(g, vals[0], vals[1])
        else:
            result = fn(*vals)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise UsageError(f"{args.op}: {exc}") from None
    text = result.to_str() if hasattr(result, "to_str") else str(result)
    _emit({"op": args.op, "result": encode(result)}, text, args.format, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_suite_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dim", type=int, default=None, help="chart dimension (default: suite-specific)")
    p.add_argument("--max-deg", type=int, default=2, help="maximal polynomial degree")
    p.add_argument("--mv-deg", type=int, default=3, help="maximal polyvector degree")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=None, help="seed (fallback: $GERBEFLOW_SEED, then 0)")
    p.add_argument("--order", type=int, default=4, help="Artin ring order N")
    p.add_argument("--span-deg", type=int, default=1, help="degree bound of the spanning family")
    p.add_argument("--tuples", type=int, default=50, help="argument tuples per structure (linfty)")
    p.add_argument("--negative-control", action="store_true",
                   help="linfty only: use a non-closed H and expect nonzero defects")
    p.add_argument("--out", default=None, help="also write the JSON report here")
    p.add_argument("--format", choices=("json", "text"), default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gerbeflow", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"gerbeflow {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("suite", help="run a seeded property suite")
    p.add_argument("name", nargs="?", help=f"one of: {', '.join(SUITES)}")
    p.add_argument("--suite", default=None, help="suite name (alternative to the positional)")
    _add_suite_flags(p)
    p.set_defaults(func=cmd_suite)

    p = sub.add_parser("mc", help="check or solve a twisted Maurer-Cartan problem file")
    p.add_argument("mode", choices=("check", "solve"))
    p.add_argument("file")
    p.add_argument("--degree-cap", type=int, default=None)
    p.add_argument("--out", default=None, help="write the solution JSON here")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("deligne", help="gauge / BCH verification suites")
    dsub = p.add_subparsers(dest="action", required=True)
    v = dsub.add_parser("verify")
    _add_suite_flags(v)
    v.set_defaults(func=cmd_deligne)

    p = sub.add_parser("eval", help="evaluate one operation on JSON operands")
    p.add_argument("op", help=f"one of: {', '.join(EVAL_OPS)}")
    p.add_argument("operands", nargs="*", help="JSON literals or @file.json")
    p.add_argument("--order", type=int, default=1, help="Artin ring order of the operands")
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"gerbeflow: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
