"""Command-line front end.

Subcommands:
  rate-curve      certified CHSH randomness rates on a log grid of n (CSV)
  bound           closed-form and alpha-optimized accumulation bounds (stdout)
  variance-curve  entropy variance of a biased bit on a uniform grid (CSV)
  verify          run the numerical property suites

Exit codes: 0 success, 1 property failure, 2 usage error.  All output is
deterministic given the flags (and seed, where applicable); CSV uses '.'
decimals, '\\n' line endings, and >= 12 significant digits.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__
from .dire import CHSH_CLASSICAL, CHSH_QUANTUM, DireConfig, rate_curve
from .eat import EatParams, TradeoffStats, eat_bound_alpha, eat_bound_theorem, optimize_alpha
from .variance import bernoulli_entropy_variance
from .verify import SUITES, run_suites


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return f"{value:.15g}"


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[str]]) -> int:
    count = 0
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")
            count += 1
    return count


def _cmd_rate_curve(args, parser: argparse.ArgumentParser) -> int:
    if not CHSH_CLASSICAL < args.e < CHSH_QUANTUM:
        parser.error(f"--e must lie in ({CHSH_CLASSICAL}, {CHSH_QUANTUM:.12g})")
    gammas = args.gamma or [1.0]
    for gamma in gammas:
        if not 0.0 < gamma <= 1.0:
            parser.error(f"--gamma must lie in (0, 1], got {gamma}")
    for flag in ("eps", "pomega"):
        if not 0.0 < getattr(args, flag) < 1.0:
            parser.error(f"--{flag} must lie in (0, 1)")
    if args.points < 2:
        parser.error("--points must be at least 2")
    if not 1 <= args.n_min <= args.n_max:
        parser.error("--n-min/--n-max must satisfy 1 <= n-min <= n-max")
    rows = []
    for gamma in gammas:
        cfg = DireConfig(n=1, gamma=gamma, e=args.e, eps=args.eps, p_omega=args.pomega)
        for pt in rate_curve(cfg, args.n_min, args.n_max, args.points, args.optimize_pb):
            rows.append((_fmt(pt.n), _fmt(pt.gamma), _fmt(pt.rate), _fmt(pt.alpha_star), _fmt(pt.p_b_used)))
    count = _write_csv(args.out, ("n", "gamma", "rate", "alpha_star", "p_b"), rows)
    print(f"wrote {count} rate points for {len(gammas)} gamma value(s) to {args.out}")
    print(f"RESULT rows={count}")
    print(f"RESULT out={args.out}")
    return 0


def _cmd_bound(args, parser: argparse.ArgumentParser) -> int:
    if args.n < 1:
        parser.error("--n must be a positive integer")
    if args.var_f < 0:
        parser.error("--var-f must be nonnegative")
    if args.d_a < 2:
        parser.error("--d-a must be at least 2")
    for flag in ("eps", "pomega"):
        if not 0.0 < getattr(args, flag) < 1.0:
            parser.error(f"--{flag} must lie in (0, 1)")
    max_f = args.h if args.max_f is None else args.max_f
    min_sigma = min(max_f, args.h) if args.min_sigma_f is None else args.min_sigma_f
    if min_sigma > max_f:
        parser.error("--min-sigma-f must not exceed --max-f")
    stats = TradeoffStats(max_f=max_f, min_f=min_sigma, min_sigma_f=min_sigma, var_f=args.var_f)
    params = EatParams(
        n=args.n, h=args.h, eps=args.eps, p_omega=args.pomega,
        d_a=args.d_a, classical_a=args.classical_a,
    )
    dim_term = 2.0 * args.d_a**2 + 1.0
    print(
        f"closed form: n*h - c*sqrt(n) - c', with "
        f"log2(2*dA^2+1) = log2({int(dim_term)}) = {math.log2(dim_term):.12g}"
    )
    theorem = eat_bound_theorem(params, stats)
    print(f"RESULT theorem_bound={_fmt(theorem.bound)}")
    print(f"RESULT c={_fmt(theorem.c)}")
    print(f"RESULT c_prime={_fmt(theorem.c_prime)}")
    print(f"RESULT small_n={_fmt(theorem.small_n)}")
    if args.alpha is not None:
        if not 1.0 < args.alpha < 2.0:
            parser.error("--alpha must lie in (1, 2)")
        value = eat_bound_alpha(params, stats, args.alpha)
        print("per-alpha bound at the requested order:")
        print(f"RESULT alpha={_fmt(args.alpha)}")
        print(f"RESULT bound_alpha={_fmt(value)}")
    else:
        alpha_star, best = optimize_alpha(params, stats)
        print("alpha-optimized bound (never below the closed form):")
        print(f"RESULT alpha_star={_fmt(alpha_star)}")
        print(f"RESULT optimized_bound={_fmt(best)}")
    return 0


def _cmd_variance_curve(args, parser: argparse.ArgumentParser) -> int:
    if args.steps < 2:
        parser.error("--steps must be at least 2")
    qs = [k / args.steps for k in range(1, args.steps)]
    values = [bernoulli_entropy_variance(q) for q in qs]
    count = _write_csv(args.out, ("q", "v"), ((_fmt(q), _fmt(v)) for q, v in zip(qs, values)))
    peak = max(range(len(qs)), key=values.__getitem__)
    print(f"wrote {count} grid points to {args.out}")
    print(f"RESULT rows={count}")
    print(f"RESULT peak_q={_fmt(qs[peak])}")
    print(f"RESULT peak_v={_fmt(values[peak])}")
    return 0


def _cmd_verify(args, parser: argparse.ArgumentParser) -> int:
    if args.trials < 1:
        parser.error("--trials must be a positive integer")
    names = args.suite or list(SUITES)
    for name in names:
        if name not in SUITES:
            parser.error(f"--suite: unknown suite {name!r}; available: {', '.join(SUITES)}")
    results = run_suites(names, seed=args.seed, trials=args.trials)
    total_failed = 0
    for res in results:
        print(f"suite {res.name}: passed={res.passed} failed={res.failed}")
        for failure in res.failures:
            print(f"  {failure}")
        total_failed += res.failed
    print(f"RESULT suites={len(results)}")
    print(f"RESULT total_failed={total_failed}")
    return 0 if total_failed == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eatkit",
        description="Certified finite-size randomness rates via entropy accumulation.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    rc = sub.add_parser("rate-curve", help="CHSH randomness rates on a log grid of n (CSV)")
    rc.add_argument("--e", type=float, default=0.8, help="winning-fraction threshold")
    rc.add_argument("--gamma", type=float, action="append",
                    help="testing probability; repeat for several curves (default 1)")
    rc.add_argument("--eps", type=float, default=1e-5, help="smoothing parameter")
    rc.add_argument("--pomega", type=float, default=1e-5,
                    help="lower bound on the non-abort probability")
    rc.add_argument("--n-min", type=float, default=1e5)
    rc.add_argument("--n-max", type=float, default=1e10)
    rc.add_argument("--points", type=int, default=20, help="grid points per gamma")
    rc.add_argument("--optimize-pb", action="store_true",
                    help="tune the tangent point per grid point")
    rc.add_argument("--out", type=Path, default=Path("rate_curve.csv"))
    rc.set_defaults(func=_cmd_rate_curve)

    bd = sub.add_parser("bound", help="accumulation bounds for explicit tradeoff statistics")
    bd.add_argument("--n", type=int, required=True, help="number of rounds")
    bd.add_argument("--h", type=float, required=True, help="tradeoff threshold (bits)")
    bd.add_argument("--var-f", type=float, default=0.0, help="upper bound on Var f")
    bd.add_argument("--max-f", type=float, default=None, help="Max f (default: h)")
    bd.add_argument("--min-sigma-f", type=float, default=None,
                    help="lower bound on Min_Sigma f (default: min(h, max-f))")
    bd.add_argument("--d-a", type=int, default=2, help="per-round output dimension")
    bd.add_argument("--classical-a", action="store_true",
                    help="per-round outputs are classical")
    bd.add_argument("--eps", type=float, default=1e-5)
    bd.add_argument("--pomega", type=float, default=1e-5)
    bd.add_argument("--alpha", type=float, default=None,
                    help="evaluate the per-alpha bound at this order instead of optimizing")
    bd.set_defaults(func=_cmd_bound)

    vc = sub.add_parser("variance-curve", help="entropy variance of a biased bit (CSV)")
    vc.add_argument("--steps", type=int, default=1000, help="grid resolution over (0, 1)")
    vc.add_argument("--out", type=Path, default=Path("variance_curve.csv"))
    vc.set_defaults(func=_cmd_variance_curve)

    vf = sub.add_parser("verify", help="run the numerical property suites")
    vf.add_argument("--seed", type=int, default=42)
    vf.add_argument("--trials", type=int, default=100, help="instances per suite")
    vf.add_argument("--suite", action="append", metavar="NAME",
                    help="run only this suite; repeatable (default: all). "
                         f"known: {', '.join(SUITES)}")
    vf.set_defaults(func=_cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args, parser)


if __name__ == "__main__":
    sys.exit(main())
