"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 usage or input error,
3 numeric error (regularity, Legendre inversion, domain).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

import numpy as np

from .dynamics import integrate
from .errors import NumericError, RegularityError, TangentFormError
from .files import load, min_speed_for, read_curve, write_trajectory
from .form import JetPoint, action, classify, random_jet_points
from .registry import REGISTRY
from .variational import el_residual, el_split, ostrogradski, solve_regular
from .verify import SUITES, verify

METHODS = {"third-order": "third_order", "phase-x": "x_flow", "phase-y": "y_flow"}


class UsageError(Exception):
    pass


def _floats(text: str, what: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        raise UsageError(f"{what}: expected comma-separated numbers, got {text!r}") from None


def _split_jet(values: list[float], m: int, levels: int, what: str) -> JetPoint:
    want = 1 + levels * m
    if len(values) != want:
        raise UsageError(f"{what}: expected {want} numbers (t then {levels} blocks of {m}), got {len(values)}")
    return JetPoint.from_vector(m, values)


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(type(o).__name__)


def _emit(obj) -> None:
    # json writes floats with repr, which round-trips binary64
    print(json.dumps(obj, default=_json_default, allow_nan=True, indent=2))


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


# subcommands ------------------------------------------------------------------------


def cmd_classify(args) -> int:
    form = load(args.form)
    lo, hi = _floats(args.range, "--range") if args.range else (-1.0, 1.0)
    if not lo < hi:
        raise UsageError("--range needs LO < HI")
    rng = np.random.default_rng(args.seed)
    points = random_jet_points(form.m, args.samples, rng, lo, hi, min_speed=min_speed_for(args.form))
    out = classify(form, points).to_dict()
    if not args.per_sample:
        out.pop("per_sample")
    out["seed"] = args.seed
    out["range"] = [lo, hi]
    _emit(out)
    return 0


def cmd_residual(args) -> int:
    form = load(args.form)
    p = _split_jet(_floats(args.jet, "--jet"), form.m, 4, "--jet")
    _emit(el_residual(form, p))
    return 0


def cmd_action(args) -> int:
    form = load(args.form)
    print(_fmt(action(form, read_curve(args.curve, form.m))))
    return 0


def cmd_integrate(args) -> int:
    form = load(args.form)
    m = form.m
    ic = _floats(args.ic, "--ic")
    if len(ic) != 1 + 3 * m:
        raise UsageError(f"--ic: expected {1 + 3 * m} numbers (t0 then three blocks of {m}), got {len(ic)}")
    traj = integrate(form, METHODS[args.method], ic[0], ic[1:], args.t1, args.dt)
    if args.out in (None, "-"):
        write_trajectory(traj, sys.stdout)
    else:
        with open(args.out, "w", newline="") as fh:
            write_trajectory(traj, fh)
        _emit({"steps": len(traj.states) - 1, "dt": traj.dt, "t1": float(traj.times[-1]), "final": traj.final})
    return 0


def cmd_reduce(args) -> int:
    form = load(args.form)
    p = _split_jet(_floats(args.at, "--at"), form.m, 3, "--at")
    split = el_split(form, p)
    try:
        w = solve_regular(split.h, -split.f)
    except RegularityError:
        w = None
    pair = ostrogradski(form, p)
    _emit(
        {
            "h": split.h,
            "f": split.f,
            "semispray": w,
            "ostrogradski": {
                "Omega_dx": pair.Omega_dx,
                "Omega_dy": pair.Omega_dy,
                "Phi_dx": pair.Phi_dx,
                "Phi_dy": pair.Phi_dy,
            },
        }
    )
    return 0


def cmd_verify(args) -> int:
    form = load(args.form)
    report = verify(form, args.suite, args.samples, args.seed, min_speed_for(args.form))
    _emit(report.to_dict())
    for r in report.results:
        if not r.passed:
            print(f"FAIL {r.suite}/{r.name}: worst={r.worst} threshold={r.threshold} {r.detail}", file=sys.stderr)
    return 0 if report.passed else 1


def cmd_examples(args) -> int:
    for name, b in REGISTRY.items():
        params = ", ".join(f"{k}={v}" for k, v in b.params.items())
        form = b.make()
        print(f"{name:20s} m={form.m}  {b.summary}" + (f"  [{params}]" if params else ""))
    return 0


def build_parser() -> argparse.ArgumentParser:
    names = ", ".join(REGISTRY)
    parser = argparse.ArgumentParser(
        prog="tangentforms",
        description="Tangent forms, their Euler-Lagrange equations and reduced Hamiltonian flows.",
        epilog=f"FORM is a TOML form file or one of the builtins: {names}. "
        "Pass numeric lists starting with '-' as --opt=-1,2.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="regular / non-degenerated / singular / basic flags")
    p.add_argument("form")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--range", help="sampling box LO,HI (default -1,1)")
    p.add_argument("--per-sample", action="store_true", help="include per-sample flags")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("residual", help="Euler-Lagrange residual at a 3-jet")
    p.add_argument("form")
    p.add_argument("--jet", required=True, help="t,x..,y..,z..,w..")
    p.set_defaults(func=cmd_residual)

    p = sub.add_parser("action", help="action of a sampled curve")
    p.add_argument("form")
    p.add_argument("--curve", required=True, help="CSV with columns t,x1..xm on a uniform grid")
    p.set_defaults(func=cmd_action)

    p = sub.add_parser("integrate", help="RK4 trajectory as CSV")
    p.add_argument("form")
    p.add_argument("--method", choices=list(METHODS), default="third-order")
    p.add_argument(
        "--ic", required=True,
        help="t0,x..,y..,z.. (third-order), t0,x..,y..,p.. (phase-x) or t0,x..,p0..,p1.. (phase-y)",
    )
    p.add_argument("--t1", type=float, required=True)
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("reduce", help="h, f, third-order semi-spray and Ostrogradski pair at a 2-jet")
    p.add_argument("form")
    p.add_argument("--at", required=True, help="t,x..,y..,z..")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("verify", help="run identity checks; exit 1 on failure")
    p.add_argument("form")
    p.add_argument("--suite", choices=["all", *SUITES], default="all")
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("examples", help="list builtin forms")
    p.set_defaults(func=cmd_examples)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "samples", 1) < 1:
        print("error: --samples must be positive", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except NumericError as exc:
        where = "" if exc.t is None else f" (at t={exc.t:.17g})"
        print(f"numeric error: {exc}{where}", file=sys.stderr)
        return 3
    except (UsageError, TangentFormError, KeyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main(argv: Sequence[str] | None = None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
