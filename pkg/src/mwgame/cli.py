"""Command-line front end: dp, simulate, bounds, converge, pde-check.

Flags only, no config file; every run is reproducible from its invocation.
JSON results go to standard output, CSV artifacts to --out, diagnostics to
standard error. Numeric output carries 9 significant digits unless
--full-precision is given.

Exit codes: 0 success, 2 domain error, 3 resource budget exceeded,
4 regret-bound violation (signals an engine bug), 5 failed analytic check.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import asymptotics, dp, simulate
from .model import DomainError, ResourceError, validate_params
from .strategies import DpPolicy, strategy_from_token

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_RESOURCE = 3
EXIT_REGRET = 4
EXIT_CHECK = 5


def _round_sig(value, full_precision):
    if full_precision or not isinstance(value, float):
        return value
    return float(f"{value:.9g}")


def _dump_json(payload, full_precision):
    rounded = {k: _round_sig(v, full_precision) for k, v in payload.items()}
    return json.dumps(rounded)


def _maybe_emit_config(args):
    if not getattr(args, "emit_config", False):
        return
    skip = {"func", "emit_config"}
    config = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    print(json.dumps(config))


def _add_common(sub):
    sub.add_argument("--full-precision", action="store_true",
                     help="emit full float precision instead of 9 significant digits")
    sub.add_argument("--emit-config", action="store_true",
                     help="print the resolved flag set as JSON before the result")


def cmd_dp(args):
    params = validate_params(args.mu, args.eps, args.horizon, args.rho0)
    _maybe_emit_config(args)
    if args.policy:
        if args.out is None:
            raise DomainError("--policy writes a CSV and needs --out FILE")
        values, policy = dp.solve(params)
        value = values.final_value
        digits = None if args.full_precision else 9
        dp.write_tables_csv(values, policy, args.out, digits=digits)
    else:
        if args.out is not None:
            raise DomainError("--out exports the solved tables and needs --policy")
        value = dp.headline_value(params)
    payload = {
        "mu": args.mu,
        "eps": args.eps,
        "horizon": args.horizon,
        "rho0": args.rho0,
        "value": value,
        "avg_value": value / args.horizon,
    }
    print(_dump_json(payload, args.full_precision))
    return EXIT_OK


def cmd_simulate(args):
    params = validate_params(args.mu, args.eps, args.horizon, args.rho0)
    if args.strategy == "two-state" and args.forecaster == "adaptive":
        raise DomainError(
            "--strategy two-state needs the fixed-eps lattice;"
            " use --forecaster mw"
        )
    _maybe_emit_config(args)
    if args.forecaster == "mw":
        forecaster = simulate.FixedMW(args.eps)
    else:
        forecaster = simulate.AdaptiveMW()
    if args.strategy == "dp-policy":
        _, policy = dp.solve(params)
        strategy = DpPolicy(policy)
    else:
        strategy = strategy_from_token(args.strategy)
    digits = None if args.full_precision else 9
    episodes = [] if args.log_episodes else None
    stats = simulate.run_batch(
        forecaster,
        strategy,
        params,
        args.reps,
        args.seed,
        episode_sink=None if episodes is None else episodes.append,
    )
    if episodes is not None:
        simulate.write_episode_csv(episodes, args.log_episodes, digits=digits)
    payload = {
        "forecaster": args.forecaster,
        "strategy": args.strategy,
        "mu": args.mu,
        "eps": args.eps,
        "horizon": args.horizon,
        "reps": args.reps,
        "master_seed": args.seed,
        "mean_avg_loss": stats.mean_avg_loss,
        "stderr": stats.stderr,
        "regret_violations": stats.regret_violations,
    }
    text = _dump_json(payload, args.full_precision)
    print(text)
    if args.out is not None:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    if stats.regret_violations > 0:
        print(
            f"error: {stats.regret_violations} episode(s) broke the path-wise"
            " regret bound; this indicates an engine bug",
            file=sys.stderr,
        )
        return EXIT_REGRET
    return EXIT_OK


def cmd_bounds(args):
    report = asymptotics.bounds_report(args.mu, args.eps, args.rho)
    _maybe_emit_config(args)
    payload = {
        "mu": report.mu,
        "eps": report.eps,
        "rho": report.rho,
        "lower": report.lower,
        "upper": report.upper,
        "pde_value_at_origin": report.pde_value_at_origin,
    }
    print(_dump_json(payload, args.full_precision))
    return EXIT_OK


def cmd_converge(args):
    try:
        horizons = [int(tok) for tok in args.horizons.split(",") if tok]
    except ValueError as exc:
        raise DomainError(f"bad horizon list {args.horizons!r}: {exc}")
    if not horizons:
        raise DomainError("at least one horizon is required")
    rows = asymptotics.convergence_study(args.mu, args.eps, args.rho0, horizons)
    _maybe_emit_config(args)
    digits = None if args.full_precision else 9
    if args.out is None:
        asymptotics.write_convergence_csv(rows, sys.stdout, digits=digits)
    else:
        asymptotics.write_convergence_csv(rows, args.out, digits=digits)
    return EXIT_OK


def cmd_pde_check(args):
    if args.samples < 1:
        raise DomainError(f"--samples must be >= 1, got {args.samples}")
    value, maximizer = asymptotics.tangential_hamiltonian(args.mu, args.resolution)
    _maybe_emit_config(args)
    rng = np.random.Generator(np.random.PCG64(args.seed))
    ts = rng.uniform(0.1, 1.5, args.samples)
    xs = rng.uniform(-2.0, 2.0, args.samples)
    worst = 0.0
    kept = 0
    for t, x in zip(ts, xs):
        try:
            residual = asymptotics.pde_residual(float(t), float(x), args.mu)
        except DomainError:
            continue
        kept += 1
        worst = max(worst, abs(residual))
    target = 1.0 - args.mu * args.mu
    hamiltonian_error = abs(value - target)
    payload = {
        "mu": args.mu,
        "samples": args.samples,
        "kept": kept,
        "seed": args.seed,
        "resolution": args.resolution,
        "max_abs_residual": worst,
        "tangential_value": value,
        "tangential_target": target,
        "tangential_maximizer": [
            _round_sig(v, args.full_precision) for v in maximizer
        ],
    }
    print(_dump_json(payload, args.full_precision))
    ok = worst <= 1e-12 and hamiltonian_error <= 2.0 / args.resolution
    if not ok:
        print(
            f"error: pde check failed (max residual {worst:.3e},"
            f" interface Hamiltonian error {hamiltonian_error:.3e})",
            file=sys.stderr,
        )
        return EXIT_CHECK
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mwgame",
        description="Solver and simulator for the malicious-expert prediction game.",
    )
    subs = parser.add_subparsers(dest="subcommand", required=True)

    p = subs.add_parser("dp", help="exact value of the malicious expert")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--rho0", type=float, required=True)
    p.add_argument("--policy", action="store_true",
                   help="keep the full table and write value/policy CSV to --out")
    p.add_argument("--out", help="CSV output path (with --policy)")
    _add_common(p)
    p.set_defaults(func=cmd_dp)

    p = subs.add_parser("simulate", help="Monte Carlo batches of the game")
    p.add_argument("--forecaster", choices=["mw", "adaptive"], required=True)
    p.add_argument("--strategy", choices=["lie", "truth", "two-state", "dp-policy"],
                   required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--rho0", type=float, default=0.5)
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", help="also write the batch JSON to this file")
    p.add_argument("--log-episodes", metavar="FILE",
                   help="write the per-round episode log CSV")
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = subs.add_parser("bounds", help="closed-form lower/upper bounds")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--rho", type=float, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_bounds)

    p = subs.add_parser("converge", help="per-round value over a horizon ladder")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--rho0", type=float, required=True)
    p.add_argument("--horizons", required=True,
                   help="comma-separated horizons, strictly ascending")
    p.add_argument("--out", help="CSV output path (default: stdout)")
    _add_common(p)
    p.set_defaults(func=cmd_converge)

    p = subs.add_parser("pde-check",
                        help="residual of the closed form and interface Hamiltonian")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--resolution", type=int, default=1001)
    p.add_argument("--seed", type=int, default=0)
    _add_common(p)
    p.set_defaults(func=cmd_pde_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
