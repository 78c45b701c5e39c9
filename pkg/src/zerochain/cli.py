"""Command-line front end.

Exit codes: 0 success, 1 validation failure, 2 usage or input error,
3 internal/solver error.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import sys
from pathlib import Path

import numpy as np

from . import io
from .instance import build_hard_instance, full_report, validate_corollary1
from .methods import DivergenceError, run_gradient_descent, score_against_bounds
from .model import ClassParams
from .sequences import (
    closed_form_bounds,
    default_schedule,
    risk_bound,
    validate_schedule,
    xrisk_bound,
)
from .simplex import SimplexQPError

EXIT_OK, EXIT_INVALID, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _params(args) -> ClassParams:
    try:
        return ClassParams(args.mu, args.L, args.Rx)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _emit(rows, header, out):
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([io.fmt(v) if not isinstance(v, str) else v for v in r])
    text = buf.getvalue()
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)
    return text


def bound_rows(params: ClassParams, N: int, variant: str) -> list[list]:
    variants = ["simple", "exact"] if variant == "all" else [variant]
    rows = []
    for v in variants:
        s = default_schedule(v, N, params)
        xr = xrisk_bound(s) if params.mu > 0 else None
        rows.append([N, v, risk_bound(s), xr])
    if variant == "all":
        cf = closed_form_bounds(params, N)
        rows.append([N, "max_form", cf.risk_strong, cf.xrisk_strong])
        rows.append([N, "max_form_weak", cf.risk_weak, cf.xrisk_weak])
    return rows


def cmd_bound(args) -> int:
    params = _params(args)
    if args.N < 0:
        raise UsageError("--N must be nonnegative")
    _emit(bound_rows(params, args.N, args.variant), ["N", "variant", "risk_bound", "xrisk_bound"], args.out)
    return EXIT_OK


def cmd_forge(args) -> int:
    params = _params(args)
    if params.mu < 0:
        raise UsageError("--mu must be nonnegative for instances")
    if args.N < 0:
        raise UsageError("--N must be nonnegative")
    s = default_schedule(args.variant, args.N, params)
    rep = validate_schedule(s)
    if not rep.passed:
        print(rep.format(), file=sys.stderr)
        return EXIT_INVALID
    if args.pad_dim is not None and args.pad_dim < args.N + 1:
        raise UsageError(f"--pad-dim must be at least N+1 = {args.N + 1}")
    h = build_hard_instance(s, dim=args.pad_dim)
    io.save_instance(h, args.out)
    rep = validate_corollary1(h)
    if not rep.passed:
        print(rep.format(), file=sys.stderr)
        names = ", ".join(c.name for c in rep.failures())
        print(f"instance fails: {names}", file=sys.stderr)
        return EXIT_INVALID
    print(f"wrote {args.out}: {s.kind.value} N={args.N} dim={h.dim}", file=sys.stderr)
    return EXIT_OK


def _load(path):
    try:
        return io.load_instance(path)
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e}") from None
    except io.InstanceFormatError as e:
        raise UsageError(f"{path}: {e}") from None


def cmd_verify(args) -> int:
    h = _load(args.input)
    if args.trials < 0:
        raise UsageError("--trials must be nonnegative")
    rep = full_report(h, trials=args.trials, seed=args.seed)
    print(rep.format())
    if rep.passed:
        print("all checks passed")
        return EXIT_OK
    print("FAILED: " + ", ".join(c.name for c in rep.failures()))
    return EXIT_INVALID


def cmd_run(args) -> int:
    h = _load(args.input)
    if args.method != "gd":
        raise UsageError(f"unknown method {args.method!r}")
    if args.steps < 0:
        raise UsageError("--steps must be nonnegative")
    if args.step_size is not None and not args.step_size > 0:
        raise UsageError("--step-size must be positive")
    oracle = h.oracle()
    try:
        t = run_gradient_descent(oracle, args.steps, args.step_size)
    except DivergenceError as e:
        print(f"divergence at iteration {e.k}: |x_k| = {e.norm:.3e}", file=sys.stderr)
        return EXIT_INVALID
    xs, fs = h.x_star, float(h.triplets.star.f)
    rows = [[k, float(np.linalg.norm(x - xs)), r.value - fs] for k, (x, r) in enumerate(zip(t.points, t.responses))]
    text = _emit(rows, ["k", "distance", "value_gap"], None)
    score = score_against_bounds(t, h, oracle)
    footer = [
        f"# method={t.method_name} steps={args.steps}",
        f"# risk_bound={io.fmt(score.risk_bound)} value_ratio={io.fmt(score.value_ratio)}",
    ]
    if score.xrisk_bound is not None:
        footer.append(f"# xrisk_bound={io.fmt(score.xrisk_bound)} distance_ratio={io.fmt(score.distance_ratio)}")
    if args.steps != h.N:
        footer.append(f"# note: bounds are certified for {h.N} steps")
    out = text + "\n".join(footer) + "\n"
    print("\n".join(footer))
    if args.out:
        Path(args.out).write_text(out)
    return EXIT_OK


TABLE_HEADER = [
    "q", "N", "simple_risk", "exact_risk", "simple_xrisk", "exact_xrisk",
    "max_form_risk", "max_form_branch", "max_form_weak_risk", "weak_xrisk",
]


def table_rows(qs, n_max: int, L: float = 1.0, R_x: float = 1.0) -> list[list]:
    rows = []
    for q in qs:
        params = ClassParams(q * L, L, R_x)
        for N in range(1, n_max + 1):
            simple = default_schedule("simple", N, params)
            exact = default_schedule("exact", N, params)
            cf = closed_form_bounds(params, N)
            sx = xrisk_bound(simple) if q > 0 else None
            ex = xrisk_bound(exact) if q > 0 else None
            rows.append([q, N, risk_bound(simple), risk_bound(exact), sx, ex,
                         cf.risk_strong, cf.risk_strong_branch, cf.risk_weak, cf.xrisk_weak])
    return rows


def cmd_table(args) -> int:
    qs = args.q
    for q in qs:
        if not 0 <= q < 1:
            raise UsageError(f"q values must lie in [0, 1), got {q}")
    if args.N_max < 1:
        raise UsageError("--N-max must be at least 1")
    _emit(table_rows(qs, args.N_max, args.L, args.Rx), TABLE_HEADER, args.out)
    return EXIT_OK


def _class_flags(p, mu_default=None):
    p.add_argument("--mu", type=float, required=mu_default is None, default=mu_default)
    p.add_argument("--L", type=float, default=1.0)
    p.add_argument("--Rx", type=float, default=1.0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="zerochain", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", help="lower-bound values for one horizon")
    _class_flags(p)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--variant", choices=["simple", "exact", "all"], default="all")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("forge", help="build and save a hard instance")
    _class_flags(p)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--variant", choices=["simple", "exact"], default="exact")
    p.add_argument("--out", required=True)
    p.add_argument("--pad-dim", type=int, dest="pad_dim")
    p.set_defaults(func=cmd_forge)

    p = sub.add_parser("verify", help="check every condition of a saved instance")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("run", help="run a method on a saved instance")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--method", default="gd")
    p.add_argument("--steps", type=int)
    p.add_argument("--step-size", type=float, dest="step_size")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("table", help="bound table over a (q, N) grid")
    p.add_argument("--q", type=float, nargs="+", default=[0.0, 0.01, 0.1, 0.25, 0.5])
    p.add_argument("--N-max", type=int, dest="N_max", default=20)
    p.add_argument("--L", type=float, default=1.0)
    p.add_argument("--Rx", type=float, default=1.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_table)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if args.command == "run" and args.steps is None:
            args.steps = _load(args.input).N
        return args.func(args)
    except (UsageError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (SimplexQPError, ArithmeticError, RuntimeError) as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
