"""Command-line front end: ``switchtemp regimes|charfn|esscher|simulate|validate``."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .charfn import CharFnEngine
from .config import DEFAULT_CONFIG_TEXT, RunConfig, load_config, parse_config
from .csvio import write_csv, write_text
from .errors import ConfigError, DomainError
from .esscher import scan_residual, solve_emm
from .mc_oracle import simulate_batch
from .regimes import count_probs, tau_cdf, tau_pdf
from .validate import format_report, run_validation

EXIT_OK, EXIT_CONFIG, EXIT_DOMAIN, EXIT_VALIDATION = 0, 2, 3, 4

DEFAULT_HORIZONS = (1 / 12, 0.25, 1.0)


def _u_grid(args, cfg: RunConfig) -> np.ndarray:
    lo = cfg.u_min if args.u_min is None else args.u_min
    hi = cfg.u_max if args.u_max is None else args.u_max
    n = cfg.u_points if args.u_points is None else args.u_points
    if n < 1 or hi < lo:
        raise ConfigError("u grid needs u_points >= 1 and u_min <= u_max")
    return np.linspace(lo, hi, n)


def cmd_regimes(cfg: RunConfig, args) -> int:
    rates, trunc = cfg.model.rates, cfg.trunc
    if args.kind == "pk":
        k_max = 8 if args.k_max is None else args.k_max
        horizons = args.t_list or ([args.t] if args.t else DEFAULT_HORIZONS)
        rows = []
        for t in horizons:
            probs = count_probs(t, rates, trunc)
            if k_max > probs.size - 1:
                raise DomainError(f"k_max={k_max} exceeds max_switches={trunc.max_switches}")
            rows.append([t, *probs[: k_max + 1]])
        ks = range(0, k_max + 1)
    else:
        k_max = 5 if args.k_max is None else args.k_max
        grid = np.linspace(0.0, args.t_max, args.t_points)
        ks = range(1, k_max + 1)
        if args.kind == "pdf":
            cols = [tau_pdf(k, grid, rates, cfg.series) for k in ks]
        else:
            cols = [[tau_cdf(k, t, rates, trunc, ctrl=cfg.series) for t in grid] for k in ks]
        rows = [[t, *(c[i] for c in cols)] for i, t in enumerate(grid)]
    out = write_csv(cfg.output_dir / f"regimes_{args.kind}.csv", ["t", *(f"k{k}" for k in ks)], rows)
    print(out)
    return EXIT_OK


def cmd_charfn(cfg: RunConfig, args) -> int:
    ctx = cfg.context(args.t, args.theta)
    engine = CharFnEngine(ctx, cfg.model)
    u = _u_grid(args, cfg)
    phi = [engine.phi_T(float(v)) for v in u]
    out = write_csv(cfg.output_dir / "charfn.csv", ["u", "re_phi", "im_phi"],
                    [[v, z.real, z.imag] for v, z in zip(u, phi)])
    c5 = engine.components(0.0).C5
    print(out)
    print(f"t={ctx.t} theta={ctx.theta} C5(0,theta)={c5.real:.11e} |C5(0,theta)-1|={abs(c5 - 1):.3e}")
    return EXIT_OK


def cmd_esscher(cfg: RunConfig, args) -> int:
    ctx = cfg.context(args.t, 0.0)
    grid, vals = scan_residual(ctx.t, ctx, cfg.model)
    scan = write_csv(cfg.output_dir / "esscher_scan.csv", ["theta", "residual"], zip(grid, vals))
    sol = solve_emm(ctx.t, ctx, cfg.model)
    summary = (f"t = {ctx.t}\ntheta* = {sol.theta:.11e}\nresidual = {sol.residual:.3e}\n"
               f"bracket = [{sol.bracket[0]:.11e}, {sol.bracket[1]:.11e}]\niterations = {sol.iterations}\n")
    write_text(cfg.output_dir / "esscher.txt", summary)
    print(scan)
    print(summary, end="")
    return EXIT_OK


def cmd_simulate(cfg: RunConfig, args) -> int:
    sim = cfg.sim if args.t is None else replace(cfg.sim, horizon=args.t)
    batch = simulate_batch(cfg.model, sim)
    out = write_csv(cfg.output_dir / "simulate.csv", ["path", "n_switches", "W", "T"],
                    ((i, n, w, t) for i, (n, w, t) in
                     enumerate(zip(batch.n_switches, batch.terminal_W, batch.terminal_T))))
    T = batch.terminal_T
    se = T.std(ddof=1) / np.sqrt(T.size) if T.size > 1 else 0.0
    print(out)
    print(f"paths={T.size} horizon={sim.horizon} mean_T={T.mean():.6f} se={se:.2e} "
          f"mean_switches={batch.n_switches.mean():.4f}")
    return EXIT_OK


def cmd_validate(cfg: RunConfig, args) -> int:
    results = run_validation(cfg)
    report = format_report(results)
    write_text(cfg.output_dir / "validate_report.txt", report)
    print(report, end="")
    return EXIT_VALIDATION if any(r.failed for r in results) else EXIT_OK


COMMANDS = {"regimes": cmd_regimes, "charfn": cmd_charfn, "esscher": cmd_esscher,
            "simulate": cmd_simulate, "validate": cmd_validate}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="switchtemp",
                                     description="Regime-switching Levy temperature model toolkit.")
    parser.add_argument("--print-default-config", action="store_true",
                        help="print the desk configuration and exit")
    sub = parser.add_subparsers(dest="command")
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="INI configuration file (desk defaults if omitted)")
        p.add_argument("--out", type=Path, help="output directory (overrides [run] output_dir)")
        p.add_argument("--t", type=float, help="horizon")
        if name == "charfn":
            p.add_argument("--theta", type=float)
            p.add_argument("--u-min", type=float)
            p.add_argument("--u-max", type=float)
            p.add_argument("--u-points", type=int)
        if name == "regimes":
            p.add_argument("--kind", choices=("pdf", "cdf", "pk"), default="pk")
            p.add_argument("--k-max", type=int)
            p.add_argument("--t-list", type=float, nargs="+", help="horizons for pk rows")
            p.add_argument("--t-max", type=float, default=3.0, help="right end of the pdf/cdf grid")
            p.add_argument("--t-points", type=int, default=3001)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.print_default_config:
        print(DEFAULT_CONFIG_TEXT, end="")
        return EXIT_OK
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = load_config(args.config) if args.config else parse_config(DEFAULT_CONFIG_TEXT)
        if args.out is not None:
            cfg = replace(cfg, output_dir=args.out)
        if args.command == "regimes" and args.kind != "pk" and not (args.t_max > 0 and args.t_points >= 2):
            raise ConfigError("--t-max must be positive and --t-points >= 2")
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DomainError, ArithmeticError) as exc:
        print(f"numerical domain error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
