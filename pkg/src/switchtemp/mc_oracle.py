"""Monte-Carlo simulation of the switching temperature model.

Paths are simulated in fixed-size blocks. Block ``b`` draws from its own
Philox stream keyed by (seed, b), so results do not depend on how many
threads run the blocks or in which order they finish.

On each path the time grid is the uniform grid of step 1/steps_per_unit with
the switch times inserted, so no step straddles a regime change. A step of
length dt in regime j adds e^{alpha s_mid} (sqrt(dR) Z + mu_j dR) to W, where
dR is the subordinator increment over dt.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .model import ModelParams, c1
from .noise import SubordinatorKind, SubordinatorSpec
from .parallel import worker_count
from .regimes import RegimeRates

__all__ = [
    "SimConfig",
    "PathSample",
    "SimBatch",
    "BLOCK_PATHS",
    "block_rng",
    "simulate_regime_sequence",
    "simulate_subordinator_increment",
    "simulate_W",
    "simulate_batch",
    "simulate_counts",
    "empirical_cf",
    "count_histogram",
]

BLOCK_PATHS = 4096


@dataclass(frozen=True)
class SimConfig:
    paths: int
    steps_per_unit: int
    seed: int
    horizon: float

    def __post_init__(self) -> None:
        if self.paths < 1:
            raise DomainError(f"paths must be >= 1, got {self.paths}")
        if self.steps_per_unit < 100:
            raise DomainError(f"steps_per_unit must be >= 100, got {self.steps_per_unit}")
        if not 0 <= self.seed < 2 ** 64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        if not self.horizon > 0:
            raise DomainError(f"horizon must be positive, got {self.horizon}")


@dataclass(frozen=True)
class PathSample:
    switch_times: tuple[float, ...]
    terminal_W: float
    terminal_T: float

    @property
    def n_switches(self) -> int:
        return len(self.switch_times)


@dataclass(frozen=True)
class SimBatch:
    """Terminal values of many paths, in path-index order."""

    terminal_W: np.ndarray
    terminal_T: np.ndarray
    n_switches: np.ndarray


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, block])))


def _switch_matrix(rates: RegimeRates, horizon: float, n: int, rng: np.random.Generator) -> np.ndarray:
    # rows are paths; switch times at or beyond the horizon are +inf
    cols = max(2, 2 * math.ceil(2 * rates.lambda21 * horizon))
    scale = np.where(np.arange(cols) % 2 == 0, 1.0 / rates.lambda12, 1.0 / rates.lambda21)
    times = np.cumsum(rng.exponential(1.0, size=(n, cols)) * scale, axis=1)
    while np.any(times[:, -1] < horizon):
        more = np.cumsum(rng.exponential(1.0, size=(n, cols)) * scale, axis=1) + times[:, -1:]
        times = np.concatenate([times, more], axis=1)
    times[times >= horizon] = np.inf
    used = int(np.isfinite(times).sum(axis=1).max(initial=0))
    return times[:, :used]


def simulate_regime_sequence(rates: RegimeRates, horizon: float, rng: np.random.Generator) -> np.ndarray:
    """Switch times in [0, horizon) of the chain started in regime 1."""
    if horizon < 0:
        raise DomainError(f"horizon must be >= 0, got {horizon}")
    if horizon == 0:
        return np.empty(0)
    row = _switch_matrix(rates, horizon, 1, rng)[0]
    return row[np.isfinite(row)]


def _inverse_gaussian(mean: np.ndarray, shape: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    # Michael, Schucany and Haas: root of the chi-square transform plus a coin flip
    y = rng.standard_normal(mean.shape) ** 2
    w = mean * y / (2.0 * shape)
    x = mean / (1.0 + w + np.sqrt(w * (w + 2.0)))
    u = rng.random(mean.shape)
    return np.where(u <= mean / (mean + x), x, mean * mean / x)


def simulate_subordinator_increment(spec: SubordinatorSpec, dt, rng: np.random.Generator):
    """Increment of the subordinator over dt (array dt gives one draw per entry; dt = 0 gives 0)."""
    dt_arr = np.asarray(dt, dtype=float)
    if np.any(dt_arr < 0) or (dt_arr.ndim == 0 and dt_arr <= 0):
        raise DomainError("dt must be positive")
    if spec.kind is SubordinatorKind.GAMMA:
        out = np.asarray(rng.gamma(spec.a * dt_arr, 1.0 / spec.b))
    else:
        pos = dt_arr > 0
        out = np.zeros(dt_arr.shape)
        ad = spec.a * dt_arr[pos]
        out[pos] = _inverse_gaussian(ad / spec.b, ad * ad, rng)
    return out if out.ndim else float(out)


def _simulate_block(p: ModelParams, horizon: float, steps_per_unit: int, n: int,
                    rng: np.random.Generator):
    switches = _switch_matrix(p.rates, horizon, n, rng)
    n_sw = np.isfinite(switches).sum(axis=1)
    steps = max(1, math.ceil(horizon * steps_per_unit))
    uniform = np.broadcast_to(np.linspace(0.0, horizon, steps + 1), (n, steps + 1))
    nodes = np.sort(np.concatenate([uniform, np.minimum(switches, horizon)], axis=1), axis=1)
    dt = np.diff(nodes, axis=1)
    mid = 0.5 * (nodes[:, 1:] + nodes[:, :-1])
    # regime 1 while an even number of switches lie before the step
    before = (switches[:, None, :] < mid[:, :, None]).sum(axis=2)
    in_one = before % 2 == 0

    dR = np.zeros_like(dt)
    mu = np.where(in_one, p.noise1.mu1, p.noise2.mu1)
    for mask, noise in ((in_one, p.noise1), (~in_one, p.noise2)):
        sel = mask & (dt > 0)
        if np.any(sel):
            dR[sel] = simulate_subordinator_increment(noise.subordinator, dt[sel], rng)
    dV = np.sqrt(dR) * rng.standard_normal(dt.shape) + mu * dR
    W = (np.exp(p.alpha * mid) * dV).sum(axis=1)
    T = c1(horizon, p) + p.sigma * math.exp(-p.alpha * horizon) * W
    return W, T, n_sw, switches


def simulate_W(p: ModelParams, cfg: SimConfig, rng: np.random.Generator) -> PathSample:
    """One path of W_t and T_t at cfg.horizon."""
    W, T, _, switches = _simulate_block(p, cfg.horizon, cfg.steps_per_unit, 1, rng)
    row = switches[0]
    return PathSample(tuple(float(x) for x in row[np.isfinite(row)]), float(W[0]), float(T[0]))


def _blocks(paths: int) -> list[tuple[int, int]]:
    return [(b, min(BLOCK_PATHS, paths - b * BLOCK_PATHS)) for b in range(math.ceil(paths / BLOCK_PATHS))]


def simulate_batch(p: ModelParams, cfg: SimConfig, threads: int | None = None) -> SimBatch:
    """cfg.paths paths, independent of the thread count."""
    def run(block):
        b, n = block
        W, T, n_sw, _ = _simulate_block(p, cfg.horizon, cfg.steps_per_unit, n, block_rng(cfg.seed, b))
        return W, T, n_sw

    with ThreadPoolExecutor(max_workers=worker_count(threads)) as pool:
        parts = list(pool.map(run, _blocks(cfg.paths)))
    return SimBatch(*(np.concatenate([part[i] for part in parts]) for i in range(3)))


def simulate_counts(rates: RegimeRates, horizon: float, paths: int, seed: int,
                    threads: int | None = None) -> np.ndarray:
    """Number of switches in [0, horizon) on each of ``paths`` chains."""
    def run(block):
        b, n = block
        return np.isfinite(_switch_matrix(rates, horizon, n, block_rng(seed, b))).sum(axis=1)

    with ThreadPoolExecutor(max_workers=worker_count(threads)) as pool:
        return np.concatenate(list(pool.map(run, _blocks(paths))))


def empirical_cf(samples, u_grid) -> tuple[np.ndarray, np.ndarray]:
    """Sample mean of exp(i u X) per u, with the standard error of that mean."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise DomainError("empirical_cf needs at least one sample")
    u = np.atleast_1d(np.asarray(u_grid, dtype=float))
    phi = np.array([np.exp(1j * v * x).mean() for v in u])
    if x.size < 2:
        return phi, np.zeros(u.size)
    # E|e^{iuX} - phi|^2 = 1 - |phi|^2
    var = np.maximum(1.0 - np.abs(phi) ** 2, 0.0) * x.size / (x.size - 1)
    return phi, np.sqrt(var / x.size)


def count_histogram(n_switches, k_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Frequencies of N = 0..k_max and their binomial standard errors."""
    counts = np.bincount(np.asarray(n_switches, dtype=int), minlength=k_max + 1)[: k_max + 1]
    n = len(n_switches)
    freq = counts / n
    return freq, np.sqrt(freq * (1.0 - freq) / n)
