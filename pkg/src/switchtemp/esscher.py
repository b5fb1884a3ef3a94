"""Esscher parameter for an equivalent martingale measure.

The mean of W_t under the tilted measure is E_theta[W_t] = D1 C5(0, theta) + D2,
where D1 and D2 are the slopes at w = 0 of the switched-segment factor C4 and
the tail factor C5 (both stored as real numbers; the factor -i of the transform
derivative is stripped). The martingale condition asks that this mean equal
sigma^{-1} e^{alpha t} (e^{r t} T0 - C1(t)).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .charfn import CharFnEngine, tail_log_coefficients
from .errors import DomainError, NoBracket, NonConvergence
from .model import EvalContext, ModelParams, c1
from .noise import log_cumulant_R_deriv
from .parallel import worker_count
from .regimes import expected_count, expected_half_count, odd_count_prob, tilted_count_probs
from .specfun import log_lower_incomplete_gamma

__all__ = [
    "EsscherSolution",
    "L_fun",
    "A_coeffs",
    "D1_fun",
    "D2_fun",
    "mean_W",
    "emm_target",
    "emm_residual",
    "admissible_strip",
    "scan_residual",
    "solve_emm",
]

SCAN_POINTS = 200
# domain violations and divergent count MGFs mark a scan point as undefined
_SKIPPED = (DomainError, ArithmeticError)


@dataclass(frozen=True)
class EsscherSolution:
    theta: float
    residual: float
    bracket: tuple[float, float]
    iterations: int


def L_fun(regime: int, theta: float, p: ModelParams) -> float:
    """(mu + theta) l_R'(mu theta + theta^2/2) / alpha."""
    noise = p.noise(regime)
    z = noise.mu1 * theta + 0.5 * theta * theta
    deriv = log_cumulant_R_deriv(noise.subordinator, z)
    return float(np.real(deriv)) * (noise.mu1 + theta) / p.alpha


def A_coeffs(theta: float, p: ModelParams) -> tuple[float, float]:
    """(A12, A21) = (L1 / (lambda12 - alpha - theta), L2 / (lambda21 - alpha - theta))."""
    d12 = p.rates.lambda12 - p.alpha - theta
    d21 = p.rates.lambda21 - p.alpha - theta
    if not (d12 > 0 and d21 > 0):
        raise DomainError(f"theta={theta} violates lambda > alpha + theta (alpha={p.alpha})")
    return L_fun(1, theta, p) / d12, L_fun(2, theta, p) / d21


def D1_fun(t: float, theta: float, ctx: EvalContext, p: ModelParams, form: str = "half") -> float:
    """Slope of C4 at w = 0 (real part after removing the factor i).

    ``form="half"`` weights the pair coefficient by the expected number of
    completed switch pairs, sum floor(k/2) p_k, which is what differentiating
    C4 term by term gives. ``form="count"`` uses the expected count sum k p_k
    instead and is kept for comparison only.
    """
    A12, A21 = A_coeffs(theta, p)
    if form == "half":
        weight = expected_half_count(t, theta, p.rates, ctx.trunc)
    elif form == "count":
        weight = expected_count(t, theta, p.rates, ctx.trunc)
    else:
        raise ValueError(f"unknown D1 form {form!r}")
    return p.alpha * ((A12 + A21) * weight + A12 * odd_count_prob(t, theta, p.rates, ctx.trunc))


def _dG_unit(m: np.ndarray, t: float, alpha: float, lam: float, ctrl) -> np.ndarray:
    # e^{alpha t} (alpha+lam)^{-m} gamma(m, (alpha+lam) t) - lam^{-m} gamma(m, lam t)
    up = alpha * t - m * math.log(alpha + lam) + log_lower_incomplete_gamma(m, (alpha + lam) * t, ctrl)
    down = -m * math.log(lam) + log_lower_incomplete_gamma(m, lam * t, ctrl)
    return np.exp(up) - np.exp(down)


def D2_fun(t: float, theta: float, ctx: EvalContext, p: ModelParams) -> float:
    """Slope of C5 at w = 0, from the closed-form slopes of the tail integrals G_j."""
    if t <= 0:
        raise DomainError(f"t must be positive, got {t}")
    K, L = ctx.trunc.max_switches, ctx.trunc.series_terms
    lam21 = p.rates.tilted(theta).lambda21
    probs = tilted_count_probs(t, theta, p.rates, ctx.trunc)
    L1, L2 = L_fun(1, theta, p), L_fun(2, theta, p)
    log_c = tail_log_coefficients(K, L, p.rates, theta)
    n = np.arange(K + 1)[:, None]
    l = np.arange(L)[None, :]
    m = (n + l).astype(float)
    unit = np.zeros_like(m)
    unit[1:] = _dG_unit(m[1:], t, p.alpha, lam21, ctx.series)
    per_n = (np.exp(log_c) * unit).sum(axis=1)
    per_n[0] = math.expm1(p.alpha * t)
    per_n *= np.where(np.arange(K + 1) % 2 == 0, L1, L2)
    return float(np.dot(per_n, probs))


def mean_W(t: float, theta: float, ctx: EvalContext, p: ModelParams, form: str = "half") -> float:
    """E_theta[W_t] = D1 C5(0, theta) + D2."""
    c5 = CharFnEngine(replace(ctx, t=t, theta=theta), p).components(0.0).C5
    return D1_fun(t, theta, ctx, p, form) * c5.real + D2_fun(t, theta, ctx, p)


def emm_target(t: float, p: ModelParams) -> float:
    """sigma^{-1} e^{alpha t} (e^{r t} T0 - C1(t)): the mean of W_t that makes e^{-rt} T_t a martingale."""
    if t <= 0:
        raise DomainError(f"t must be positive, got {t}")
    return math.exp(p.alpha * t) * (math.exp(p.r * t) * p.T0 - c1(t, p)) / p.sigma


def emm_residual(theta: float, t: float, ctx: EvalContext, p: ModelParams, form: str = "half") -> float:
    return mean_W(t, theta, ctx, p, form) - emm_target(t, p)


def admissible_strip(p: ModelParams) -> tuple[float, float]:
    """Open interval scanned for the Esscher parameter."""
    lam = p.rates.lambda12
    lo = -0.9 * lam
    hi = min(lam - p.alpha, lam) - 1e-6 * lam
    if not hi > lo:
        raise DomainError(f"empty Esscher strip: lambda12={lam}, alpha={p.alpha}")
    return lo, hi


def _safe_residual(theta, t, ctx, p, form):
    try:
        val = emm_residual(theta, t, ctx, p, form)
    except _SKIPPED:
        return math.nan
    return val if math.isfinite(val) else math.nan


def scan_residual(t: float, ctx: EvalContext, p: ModelParams, points: int = SCAN_POINTS,
                  threads: int | None = None, form: str = "half") -> tuple[np.ndarray, np.ndarray]:
    """Residual on a uniform grid across the strip; NaN where the model is not defined."""
    lo, hi = admissible_strip(p)
    grid = np.linspace(lo, hi, points)
    with ThreadPoolExecutor(max_workers=worker_count(threads)) as pool:
        vals = list(pool.map(lambda th: _safe_residual(float(th), t, ctx, p, form), grid))
    return grid, np.array(vals)


def solve_emm(t: float, ctx: EvalContext, p: ModelParams, solver_tol: float = 1e-10,
              threads: int | None = None, form: str = "half", max_iter: int = 200) -> EsscherSolution:
    """Scan the strip, take the sign change closest to theta = 0 and bisect it."""
    if not solver_tol > 0:
        raise DomainError("solver_tol must be positive")
    grid, vals = scan_residual(t, ctx, p, threads=threads, form=form)
    ok = np.flatnonzero(np.isfinite(vals))
    if ok.size == 0:
        raise NoBracket("residual undefined everywhere on the scanned strip")
    exact = ok[vals[ok] == 0.0]
    if exact.size:
        i = exact[np.argmin(np.abs(grid[exact]))]
        return EsscherSolution(float(grid[i]), 0.0, (float(grid[i]), float(grid[i])), 0)

    brackets = [(i, j) for i, j in zip(ok[:-1], ok[1:]) if j == i + 1 and vals[i] * vals[j] < 0]
    if not brackets:
        raise NoBracket(f"no sign change of the EMM residual on [{grid[0]:.4g}, {grid[-1]:.4g}]")
    i, j = min(brackets, key=lambda b: min(abs(grid[b[0]]), abs(grid[b[1]])))
    a, b, fa = float(grid[i]), float(grid[j]), float(vals[i])
    bracket = (a, b)
    for it in range(1, max_iter + 1):
        mid = 0.5 * (a + b)
        fm = emm_residual(mid, t, ctx, p, form)
        if abs(fm) < solver_tol or b - a < 1e-12:
            return EsscherSolution(mid, fm, bracket, it)
        if (fm < 0) == (fa < 0):
            a, fa = mid, fm
        else:
            b = mid
    raise NonConvergence(f"bisection did not reach tolerance in {max_iter} steps")
