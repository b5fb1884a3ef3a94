"""Oracle battery behind the ``validate`` subcommand."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.stats import chi2

from .charfn import CharFnEngine
from .config import RunConfig
from .esscher import mean_W, solve_emm
from .mc_oracle import count_histogram, empirical_cf, simulate_batch
from .model import ModelParams, c1
from .noise import NoiseSpec, SubordinatorSpec
from .reference import phi_T_exact
from .regimes import count_probs

__all__ = ["CheckResult", "run_validation", "format_report", "MIN_STAT_PATHS"]

MIN_STAT_PATHS = 1000
CF_GRID = np.linspace(-5.0, 5.0, 21)


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str          # PASS, FAIL, SKIPPED or INFO
    measured: float
    tolerance: float
    note: str = ""

    @property
    def failed(self) -> bool:
        return self.status == "FAIL"


def _status(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


def gaussian_limit_params(p: ModelParams, clock_rate: float = 1.0, b: float = 1e4) -> ModelParams:
    """Identical driftless regimes whose Gamma clock is nearly deterministic with rate clock_rate."""
    noise = NoiseSpec(SubordinatorSpec.gamma(clock_rate * b, b), 0.0)
    return replace(p, noise1=noise, noise2=noise)


def gaussian_cf(u, t: float, p: ModelParams, clock_rate: float = 1.0):
    var = p.sigma ** 2 * clock_rate * (1.0 - math.exp(-2.0 * p.alpha * t)) / (2.0 * p.alpha)
    u = np.asarray(u, dtype=float)
    return np.exp(1j * u * c1(t, p) - 0.5 * u * u * var)


def run_validation(cfg: RunConfig, threads: int | None = None) -> list[CheckResult]:
    p, t = cfg.model, cfg.sim.horizon
    ctx = cfg.context(t=t, theta=0.0)
    engine = CharFnEngine(ctx, p)
    results = []

    c5 = engine.components(0.0).C5
    results.append(CheckResult("C5(0,0) deviation from 1", "INFO", abs(c5 - 1.0), math.nan,
                               "product formula normalisation at u = 0"))

    stat = cfg.sim.paths >= MIN_STAT_PATHS
    if stat:
        batch = simulate_batch(p, cfg.sim, threads)
        freq, _ = count_histogram(batch.n_switches, 8)
        expected = count_probs(t, p.rates, cfg.trunc)[:9]
        obs = np.append(freq, 1.0 - freq.sum()) * cfg.sim.paths
        exp = np.append(expected, max(1.0 - expected.sum(), 0.0)) * cfg.sim.paths
        keep = exp > 0
        stat_chi = float(((obs[keep] - exp[keep]) ** 2 / exp[keep]).sum())
        pval = float(chi2.sf(stat_chi, keep.sum() - 1))
        results.append(CheckResult("regime-count chi-square p-value", _status(pval > 0.01), pval, 0.01,
                                   f"k <= 8 plus tail bin, {cfg.sim.paths} paths"))

        phi_mc, se = empirical_cf(batch.terminal_T, CF_GRID)
        phi_an = np.array([engine.phi_T(u) for u in CF_GRID])
        gap = np.abs(phi_an - phi_mc)
        tol = np.maximum(0.03, 4.0 * se)
        worst = int(np.argmax(gap / tol))
        results.append(CheckResult("analytic vs empirical cf sup gap", _status(bool(np.all(gap <= tol))),
                                   float(gap.max()), float(tol[worst]), "u in [-5, 5], 21 points"))
        phi_ex = np.array([phi_T_exact(u, ctx, p) for u in CF_GRID])
        results.append(CheckResult("exact reference vs empirical cf sup gap", "INFO",
                                   float(np.abs(phi_ex - phi_mc).max()), float(tol.min()),
                                   "backward-equation reference, no product approximation"))
    else:
        for name in ("regime-count chi-square p-value", "analytic vs empirical cf sup gap"):
            results.append(CheckResult(name, "SKIPPED", math.nan, math.nan,
                                       f"needs >= {MIN_STAT_PATHS} paths"))

    pg = gaussian_limit_params(p)
    eng_g = CharFnEngine(ctx, pg)
    target = gaussian_cf(CF_GRID, t, pg)
    gap_g = np.abs(np.array([eng_g.phi_T(u) for u in CF_GRID]) - target).max()
    results.append(CheckResult("Gaussian OU limit sup gap", _status(gap_g <= 1e-3), float(gap_g), 1e-3))
    gap_gx = np.abs(np.array([phi_T_exact(u, ctx, pg) for u in CF_GRID]) - target).max()
    results.append(CheckResult("Gaussian OU limit, exact reference", "INFO", float(gap_gx), 1e-3))

    sol = solve_emm(t, ctx, p, threads=threads)
    ctx_q = replace(ctx, theta=sol.theta)
    ET = c1(t, p) + p.sigma * math.exp(-p.alpha * t) * mean_W(t, sol.theta, ctx_q, p)
    rel = abs(math.exp(-p.r * t) * ET - p.T0) / abs(p.T0)
    results.append(CheckResult("Esscher plug-back relative error", _status(rel <= 1e-4), rel, 1e-4,
                               f"theta* = {sol.theta:.6g}"))
    return results


def format_report(results: list[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'check'.ljust(width)}  status   measured           tolerance          note"]
    for r in results:
        lines.append(f"{r.name.ljust(width)}  {r.status:<7}  {r.measured:<17.6e}  {r.tolerance:<17.6e}  {r.note}")
    return "\n".join(lines) + "\n"
