"""Command line entry point.

Subcommands: simulate, experiment, bounds, clt, rate-table,
poisson-validate.  Exit codes: 0 success, 2 configuration error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .harness import (ConfigError, ErrorCurve, config_hash, load_config,
                      mu_f_quadrature, run_error_experiment)
from .langevin import discrete_ou_variance
from .poisson import solve_poisson_1d, verify_estimates
from .potentials import POWER_LAW, SUBEXP
from .rates import (CauchyExplicitAlpha, PowerAlpha, SubExpLogAlpha,
                    clt_check, compute_constants, lambert_asymptote,
                    paper_example_constants, rate_table, strong_xi_curve,
                    tau_exponent)
from .simulate import EnvelopeViolation, simulate

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _add_common(sub):
    sub.add_argument("--config", required=True, help="INI config file")
    sub.add_argument("--seed", type=int, default=None, help="override seed")
    sub.add_argument("--workers", type=int, default=None,
                     help="override worker count")
    sub.add_argument("--out", default=".", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pdmp-heavytail",
        description="PDMP samplers and convergence bounds for heavy tails")
    subs = parser.add_subparsers(dest="command", required=True)
    for name in ("simulate", "experiment", "bounds", "clt",
                 "poisson-validate"):
        _add_common(subs.add_parser(name))
    subs.add_parser("rate-table")
    return parser


def _alpha_for(cfg):
    """Default alpha family for the configured target."""
    pot = cfg.potential
    if pot.family == POWER_LAW:
        if pot.dim == 1 and pot.params["p"] == 1.0:
            return CauchyExplicitAlpha()
        return PowerAlpha(c=1.0, tau=tau_exponent(pot.dim, pot.params["p"]))
    if pot.family == SUBEXP:
        return SubExpLogAlpha(c=1.0, delta=pot.params["delta"])
    raise ConfigError("no analytic alpha family for this potential")


def cmd_simulate(args) -> int:
    cfg = load_config(args.config, args.seed, args.workers)
    if cfg.sampler not in ("zigzag", "bps"):
        raise ConfigError("simulate dumps PDMP skeletons; pick zigzag or bps")
    x0 = cfg.x0 if cfg.x0 != "stationary" else 0.0
    path = simulate(cfg.sampler, cfg.potential, cfg.nu, cfg.lambda_ref,
                    np.atleast_1d(float(x0)), cfg.v0,
                    float(cfg.grid_times[-1]), cfg.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    d = path.dim
    with open(out / "skeleton.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [f"x{i}" for i in range(d)]
                        + [f"v{i}" for i in range(d)] + ["kind"])
        writer.writerow([0.0] + list(path.x0) + list(path.v0) + ["start"])
        for i in range(path.n_events):
            kind = "refresh" if path.kinds[i] < 0 else f"bounce{path.kinds[i]}"
            writer.writerow([path.times[i]] + list(path.xs[i])
                            + list(path.vs[i]) + [kind])
    print(f"wrote {path.n_events} events to {out / 'skeleton.csv'}")
    return EXIT_OK


def cmd_experiment(args) -> int:
    cfg = load_config(args.config, args.seed, args.workers)
    curve = run_error_experiment(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    curve.metadata["config_hash"] = config_hash(args.config)
    curve.write_csv(out / f"{cfg.label}.csv")
    curve.write_json(out / f"{cfg.label}.json")
    print(f"wrote {out / (cfg.label + '.csv')} "
          f"({curve.n_paths} paths, mu(f) = {curve.metadata['mu_f']:.6g})")
    return EXIT_OK


def cmd_bounds(args) -> int:
    cfg = load_config(args.config, args.seed, args.workers)
    consts = compute_constants(cfg.potential, cfg.nu, cfg.lambda_ref,
                               cfg.sampler if cfg.sampler in ("zigzag", "bps")
                               else "zigzag")
    print("computed constants:")
    print(consts.report())
    paper = paper_example_constants(c_u=cfg.potential.hessian_lower_bound,
                                    lambda_ref=cfg.lambda_ref)
    print("\nworked-example constant set (same targets, different algebra):")
    for k, v in paper.items():
        print(f"{k:>10s} = {v:.10g}")
    alpha = _alpha_for(cfg)
    xi = strong_xi_curve(alpha, consts.c1, consts.c2_prime)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ts = np.logspace(-2, 8, 201)
    with open(out / "bounds.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "xi", "lambert_asymptote"])
        for t in ts:
            writer.writerow([repr(float(t)), repr(xi(float(t))),
                             repr(lambert_asymptote(float(t), consts.c1,
                                                    consts.c2_prime))])
    print(f"\nwrote {out / 'bounds.csv'}")
    return EXIT_OK


def cmd_clt(args) -> int:
    cfg = load_config(args.config, args.seed, args.workers)
    alpha = _alpha_for(cfg)
    if isinstance(alpha, CauchyExplicitAlpha):
        alpha = PowerAlpha(c=1.0, tau=tau_exponent(1, 1.0))
    verdict = clt_check(alpha)
    print(f"CLT criterion: {verdict.verdict} (margin {verdict.margin:.6g})")
    print(verdict.detail)
    return EXIT_OK


def cmd_rate_table(_args) -> int:
    table = rate_table()
    width = max(len(k) for k in table)
    print(f"{'dynamics':<{width}s}  power (t^-e)      subexp (exp(-k t^e))")
    for row, cols in table.items():
        print(f"{row:<{width}s}  {cols['power']:<16s}  {cols['subexp']}")
    return EXIT_OK


def cmd_poisson_validate(args) -> int:
    cfg = load_config(args.config, args.seed, args.workers)
    consts = compute_constants(cfg.potential, cfg.nu, cfg.lambda_ref, "zigzag")
    g = lambda x: 1.0 / (1.0 + x * x)
    sol = solve_poisson_1d(cfg.potential, g, L=100.0, n=2 ** 13)
    report = verify_estimates(sol, consts.kappa1, consts.kappa2)
    print(report.table())
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "poisson.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "u", "du", "d2u"])
        for i in range(sol.grid.size):
            writer.writerow([sol.grid[i], sol.u[i], sol.du[i], sol.d2u[i]])
    return EXIT_OK if report.all_ok else EXIT_NUMERICAL


COMMANDS = {
    "simulate": cmd_simulate,
    "experiment": cmd_experiment,
    "bounds": cmd_bounds,
    "clt": cmd_clt,
    "rate-table": cmd_rate_table,
    "poisson-validate": cmd_poisson_validate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (EnvelopeViolation, FloatingPointError, np.linalg.LinAlgError,
            ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
