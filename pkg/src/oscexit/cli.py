"""Batch command line front-end.

Every command evaluates a Cartesian grid of its numeric flags (in the order
given) and writes one row per grid point as CSV or JSON. Exit status is 1 when
a validation command fails and 2 on input errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import sys
from dataclasses import asdict
from typing import Sequence

from . import functionals as fn
from .asymptotics import StudyGeometry, convergence_study, convergence_violations
from .levy import OscillatingModel, load_model
from .scale import resolvent_handle
from .validation import HOMOGENEOUS, ZERO_MEAN_OSC, run_validation

PR_TOL = 1e-6


class InputError(Exception):
    pass


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def write_rows(rows: list[dict], out, fmt: str) -> None:
    if fmt == "json":
        out.write(json.dumps(rows, indent=2))
        out.write("\n")
        return
    if not rows:
        return
    w = csv.writer(out, lineterminator="\n")
    w.writerow(list(rows[0]))
    for r in rows:
        w.writerow([_fmt(v) for v in r.values()])


def _model(args, default: OscillatingModel) -> OscillatingModel:
    if args.model is None:
        return default
    try:
        return load_model(args.model)
    except (OSError, KeyError, ValueError, TypeError) as exc:
        raise InputError(f"cannot load model {args.model}: {exc}") from exc


def _comp(args, model):
    return model.comp1 if args.component == 1 else model.comp2


def _grid(*lists):
    return itertools.product(*lists)


def cmd_exponent(args):
    comp = _comp(args, _model(args, HOMOGENEOUS))
    mean, var = comp.mean_rate, comp.variance_rate
    rows = []
    for s, z in _grid(args.s, args.z):
        rows.append({
            "component": args.component, "s": s, "z": z,
            "exponent": float(comp.exponent(z)), "cramer_root": comp.cramer_root(s),
            "mean_rate": mean, "variance_rate": var,
        })
    return rows, 0


def cmd_resolvent(args):
    comp = _comp(args, _model(args, HOMOGENEOUS))
    rows = [
        {"component": args.component, "s": s, "x": x,
         "resolvent": float(resolvent_handle(comp, s)(x))}
        for s, x in _grid(args.s, args.x)
    ]
    return rows, 0


def cmd_passage(args):
    comp = _comp(args, _model(args, HOMOGENEOUS))
    rows = []
    for s, z, x in _grid(args.s, args.z, args.x):
        if args.direction == "down":
            v = fn.passage_down_lt(comp, x, s)
        else:
            v = fn.cross_up_lt(comp, x, z, s)
        rows.append({"component": args.component, "direction": args.direction,
                     "s": s, "z": z, "x": x, "value": float(v)})
    return rows, 0


def cmd_exit(args):
    comp = _comp(args, _model(args, HOMOGENEOUS))
    rows = []
    for s, z, d, x in _grid(args.s, args.z, args.d, args.x):
        down, up = fn.exit_interval_lt(comp, x, d, z, s)
        rows.append({"component": args.component, "s": s, "z": z, "d": d, "x": x,
                     "down": down, "up": float(up)})
    return rows, 0


def cmd_osc_passage(args):
    model = _model(args, HOMOGENEOUS)
    rows = []
    if args.direction == "down":
        if args.r is None:
            raise InputError("osc-passage --direction down needs --r")
        for s, r, x in _grid(args.s, args.r, args.x):
            rows.append({"direction": "down", "b": model.b, "s": s, "z": 0.0, "x": x,
                         "level": r, "value": fn.osc_passage_down_lt(model, x, r, s)})
    else:
        if args.k is None:
            raise InputError("osc-passage --direction up needs --k")
        for s, z, k, x in _grid(args.s, args.z, args.k, args.x):
            rows.append({"direction": "up", "b": model.b, "s": s, "z": z, "x": x,
                         "level": k, "value": float(fn.osc_cross_up_lt(model, x, k, z, s))})
    return rows, 0


def cmd_osc_exit(args):
    model = _model(args, HOMOGENEOUS)
    rows = []
    for s, z, B, x in _grid(args.s, args.z, args.B, args.x):
        down, up = fn.osc_exit_interval_lt(model, x, B, z, s)
        rows.append({"b": model.b, "s": s, "z": z, "B": B, "x": x,
                     "down": down, "up": float(up)})
    return rows, 0


def cmd_mc_validate(args):
    model = _model(args, None) if args.model else None
    res = run_validation(n=args.n, seed=args.seed, model=model, workers=args.workers)
    rows = [
        {"functional": r.functional, "params": r.params, "closed_form": r.closed_form,
         "mc_value": r.mc_value, "stderr": r.stderr, "z_score": r.z_score, "pass": r.passed}
        for r in res
    ]
    return rows, 0 if all(r.passed for r in res) else 1


def cmd_limit_study(args):
    model = _model(args, ZERO_MEAN_OSC)
    geometry = StudyGeometry(b=args.b) if args.b is not None else StudyGeometry()
    try:
        res = convergence_study(model, geometry, args.s[0], args.B)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    bad = set(convergence_violations(res))
    rows = [asdict(r) for r in res]
    return rows, 1 if bad else 0


def cmd_pr_check(args):
    comp = _comp(args, _model(args, HOMOGENEOUS))
    rows, status = [], 0
    for s, z, p in _grid(args.s, args.z, args.p):
        chk = fn.verify_pecherskii_rogozin(comp, z, s, p, args.x_max)
        ok = chk.abs_err < PR_TOL
        status = status or (0 if ok else 1)
        rows.append({"component": args.component, "s": s, "z": z, "p": p,
                     "lhs": chk.lhs.real, "rhs": chk.rhs.real, "abs_err": chk.abs_err,
                     "pass": ok})
    return rows, status


COMMANDS = {
    "exponent": cmd_exponent,
    "resolvent": cmd_resolvent,
    "passage": cmd_passage,
    "exit": cmd_exit,
    "osc-passage": cmd_osc_passage,
    "osc-exit": cmd_osc_exit,
    "mc-validate": cmd_mc_validate,
    "limit-study": cmd_limit_study,
    "pr-check": cmd_pr_check,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", help="model definition JSON (default: built-in model)")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--s", type=float, nargs="+", default=[1.0])
    common.add_argument("--z", type=float, nargs="+", default=[0.0])

    def floats(p, name, required=False, default=None):
        p.add_argument(f"--{name}", type=float, nargs="+", required=required, default=default)

    parser = argparse.ArgumentParser(prog="oscexit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("exponent", "resolvent", "passage", "exit", "pr-check"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--component", type=int, choices=(1, 2), default=1)
        if name == "resolvent":
            floats(p, "x", required=True)
        if name == "passage":
            p.add_argument("--direction", choices=("down", "up"), default="down")
            floats(p, "x", required=True)
        if name == "exit":
            floats(p, "x", required=True)
            floats(p, "d", required=True)
        if name == "pr-check":
            floats(p, "p", required=True)
            p.add_argument("--x-max", type=float, default=None)

    p = sub.add_parser("osc-passage", parents=[common])
    p.add_argument("--direction", choices=("down", "up"), default="down")
    floats(p, "x", required=True)
    floats(p, "r")
    floats(p, "k")

    p = sub.add_parser("osc-exit", parents=[common])
    floats(p, "x", required=True)
    floats(p, "B", required=True)

    p = sub.add_parser("mc-validate", parents=[common])
    p.add_argument("--n", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("limit-study", parents=[common])
    floats(p, "B", default=[10.0, 50.0, 250.0])
    p.add_argument("--b", type=float, default=None, help="unscaled switching level")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rows, status = COMMANDS[args.command](args)
    except (InputError, fn.GeometryError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    buf = io.StringIO()
    write_rows(rows, buf, args.format)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return status


if __name__ == "__main__":
    sys.exit(main())
