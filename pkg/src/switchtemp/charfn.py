"""Characteristic function of the switching temperature model, historical and Esscher-tilted.

Internally everything is expressed in the variable ``w`` of W_t, the stochastic
part of T_t = C1(t) + sigma e^{-alpha t} W_t, so that the integrand weight is
``f(s) = w e^{alpha s}``. The temperature variable is u = w e^{alpha t} / sigma.

The assembly follows the factorised product form: a switched-segment factor
C4 built from the half-line integrals J1, J2, times a tail-segment factor C5
built from the finite integrals G_j and the switching-time densities.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, NonFiniteIntegrand, TruncationWarning
from .model import EvalContext, ModelParams, c1
from .noise import NoiseSpec, log_cumulant_R, log_cumulant_V
from .numerics import halfline_cutoff, panel_count, tail_sum, trapezoid, trapezoid_weights
from .regimes import RegimeRates, coeff_C, coeff_D, count_probs, tilted_count_probs
from .specfun import SeriesControl

__all__ = [
    "g_fun",
    "tilt_offset",
    "big_I",
    "big_J12",
    "big_G",
    "big_J34",
    "tail_log_coefficients",
    "CharFnEngine",
    "Components",
    "phi_W",
    "phi_T",
    "phi_W_historical",
    "phi_T_historical",
    "w_of_u",
]

# |f| = |w| e^{alpha s} is kept below this so that f^2 stays finite
_F_LOG_CAP = math.log(1e150)


def w_of_u(u: float, t: float, p: ModelParams) -> float:
    """Map the temperature transform variable to the W_t variable."""
    return u * p.sigma * math.exp(-p.alpha * t)


def _weight(w: complex, alpha: float, s: np.ndarray):
    # f(s) = w e^{alpha s}; long half-line grids at w = 0 would otherwise give 0 * inf
    if w == 0:
        return np.zeros_like(s)
    return w * np.exp(alpha * s)


def _g(mu: float, f, theta: float):
    z = 1j * np.asarray(f) + theta
    return mu * z + 0.5 * z * z


def g_fun(regime: int, u: float, s, ctx: EvalContext, p: ModelParams):
    """Argument of the subordinator exponent: i u mu sigma e^{-alpha(t-s)} + mu theta + (i u sigma e^{-alpha(t-s)} + theta)^2 / 2."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0) or np.any(s > ctx.t):
        raise DomainError("g_fun needs 0 <= s <= t")
    f = u * p.sigma * np.exp(-p.alpha * (ctx.t - s))
    out = _g(p.noise(regime).mu1, f, ctx.theta)
    return out if np.ndim(out) else complex(out)


def tilt_offset(noise: NoiseSpec, theta: float) -> float:
    """l_R(mu theta + theta^2 / 2): the exponent removed by the Esscher normalisation."""
    if theta == 0:
        return 0.0
    return float(np.real(log_cumulant_R(noise.subordinator, noise.mu1 * theta + 0.5 * theta * theta)))


def big_I(regime: int, u: float, x: float, ctx: EvalContext, p: ModelParams) -> complex:
    """Integral over [0, x] of l_R(g_j(u, s, theta)) minus the linear tilt term."""
    if not 0 <= x <= ctx.t:
        raise DomainError(f"x must lie in [0, t], got {x}")
    noise = p.noise(regime)
    w = w_of_u(u, ctx.t, p)
    kappa = tilt_offset(noise, ctx.theta)

    def integrand(s):
        return log_cumulant_R(noise.subordinator, _g(noise.mu1, w * np.exp(p.alpha * s), ctx.theta)) - kappa

    return complex(trapezoid(integrand, 0.0, x, ctx.quad))


def tail_log_coefficients(max_index: int, n_terms: int, rates: RegimeRates, theta: float) -> np.ndarray:
    """log of D(m1, -m2, n, theta) C(m1, n, l) lambda21^l for n = 1..max_index, l < n_terms.

    Row n holds the coefficients of z^{n+l-1} e^{-(lambda21-theta) z} in the
    tilted density of the n-th switching time; row 0 is -inf (no density).
    The product C(m1, n, l) lambda21^l only involves lambda21 - lambda12 and is
    therefore unchanged by the tilt.
    """
    r = rates.tilted(theta)
    n = np.arange(max_index + 1, dtype=float)[:, None]
    l = np.arange(n_terms, dtype=float)[None, :]
    m1 = np.floor((n + 1) / 2)
    m2 = np.floor(n / 2)
    out = np.full((max_index + 1, n_terms), -np.inf)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = (m1 * math.log(r.lambda12) + m2 * math.log(r.lambda21) - gammaln(n)
                + gammaln(m1 + l) - gammaln(m1) - gammaln(n + l) + gammaln(n)
                - gammaln(l + 1) + l * math.log(rates.lambda21 - rates.lambda12))
    out[1:] = vals[1:]
    return out


@dataclass(frozen=True)
class Components:
    """Intermediate quantities of one evaluation at W-variable ``w``."""

    w: complex
    J1: complex
    J2: complex
    tail: np.ndarray       # E[exp I(t - tau_n)] terms for n = 0..K (J3 at even n, J4 at odd n)
    C4: complex
    C5: complex

    @property
    def phi(self) -> complex:
        return self.C4 * self.C5


class CharFnEngine:
    """Evaluates C4, C5 and the characteristic function for one (t, theta, model) triple.

    Everything that does not depend on the transform variable (grids, tilted
    count law, density coefficients) is built once; instances are read-only
    afterwards and can be shared between threads.
    """

    def __init__(self, ctx: EvalContext, p: ModelParams):
        ctx.check(p)
        self.ctx = ctx
        self.p = p
        self.t = ctx.t
        self.theta = ctx.theta
        self.n_t = panel_count(0.0, ctx.t, ctx.quad)
        self.h = ctx.t / self.n_t
        self.rates_q = p.rates.tilted(ctx.theta)
        self.K = ctx.trunc.max_switches
        self.probs = tilted_count_probs(ctx.t, ctx.theta, p.rates, ctx.trunc)
        self.kappa = (tilt_offset(p.noise1, ctx.theta), tilt_offset(p.noise2, ctx.theta))
        self.decay = (self.rates_q.lambda12, self.rates_q.lambda21)
        self.inner_ctrl = SeriesControl(ctx.trunc.series_terms, ctx.series.rel_tol, ctx.series.abs_tol)

    @cached_property
    def _tail_weights(self) -> np.ndarray:
        # W[n, l, i] = trapezoid weight * coefficient * z_i^{n+l-1} e^{-(lambda21 - theta) z_i}
        z = self.h * np.arange(self.n_t + 1)
        log_c = tail_log_coefficients(self.K, self.ctx.trunc.series_terms, self.p.rates, self.theta)
        n = np.arange(self.K + 1)[:, None, None]
        l = np.arange(self.ctx.trunc.series_terms)[None, :, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            logz = np.log(z)[None, None, :]
            expo = log_c[:, :, None] + (n + l - 1) * logz - self.rates_q.lambda21 * z[None, None, :]
        expo = np.where(np.isnan(expo), -np.inf, expo)
        # z^0 at z = 0 is 1 (only for n + l = 1)
        expo[:, :, 0] = np.where((n + l)[:, :, 0] == 1, log_c, -np.inf)
        weights = np.exp(expo) * trapezoid_weights(self.n_t, self.h)[None, None, :]
        weights.setflags(write=False)
        return weights

    def _halfline_nodes(self, regime: int, w: complex) -> int:
        quad = self.ctx.quad
        n = math.ceil(halfline_cutoff(self.decay[regime - 1], quad) / self.h)
        n = min(n, quad.max_halfline_nodes)
        if w != 0:
            s_cap = (_F_LOG_CAP - math.log(abs(w))) / self.p.alpha
            n = min(n, int(s_cap / self.h))
        return max(n, self.n_t)

    def cumulative_I(self, regime: int, w: complex, n_nodes: int) -> np.ndarray:
        """I_j(w, s_i) on the nodes s_i = i h, i = 0..n_nodes (cumulative trapezoid)."""
        noise = self.p.noise(regime)
        s = self.h * np.arange(n_nodes + 1)
        vals = log_cumulant_R(noise.subordinator, _g(noise.mu1, _weight(w, self.p.alpha, s), self.theta))
        vals = np.asarray(vals) - self.kappa[regime - 1]
        if not np.all(np.isfinite(vals)):
            raise NonFiniteIntegrand(f"exponent of regime {regime} not finite at w={w}")
        out = np.empty(n_nodes + 1, dtype=complex)
        out[0] = 0.0
        np.cumsum(0.5 * self.h * (vals[1:] + vals[:-1]), out=out[1:])
        return out

    def components(self, w: complex) -> Components:
        J = []
        I_on_t = []
        for regime in (1, 2):
            n_half = self._halfline_nodes(regime, w)
            I = self.cumulative_I(regime, w, n_half)
            x = self.h * np.arange(n_half + 1)
            integrand = np.exp(I - self.decay[regime - 1] * x)
            if abs(integrand[-1]) > 1e3 * self.ctx.quad.halfline_envelope_tol:
                warnings.warn(f"J{regime} cut at x={x[-1]:.4g} with |integrand|={abs(integrand[-1]):.3g}",
                              TruncationWarning, stacklevel=2)
            J.append(complex(np.dot(trapezoid_weights(n_half, self.h), integrand)))
            I_on_t.append(I[: self.n_t + 1])
        J1, J2 = J

        # E_j(z_i) = exp(I_j(t - z_i)) on the tail grid z_i = i h
        E = [np.exp(I[::-1]) for I in I_on_t]
        W = self._tail_weights
        tail = np.empty(self.K + 1, dtype=complex)
        tail[0] = np.exp(I_on_t[0][-1])
        worst = 0.0
        for n in range(1, self.K + 1):
            terms = W[n] @ E[0 if n % 2 == 0 else 1]
            tail[n] = tail_sum(lambda l: terms[l], self.inner_ctrl, warn=False)
            worst = max(worst, abs(terms[-1]) * self.probs[n])
        if worst > 1e-10:
            warnings.warn(f"tail series truncated at {self.ctx.trunc.series_terms} terms "
                          f"(weighted last term {worst:.3g})", TruncationWarning, stacklevel=2)

        p = self.probs
        l12, l21 = self.rates_q.lambda12, self.rates_q.lambda21
        q = l12 * l21 * J1 * J2
        p_next = np.append(p, 0.0)
        C4 = tail_sum(lambda k: q ** k * (p_next[2 * k] + l12 * J1 * p_next[2 * k + 1]),
                      SeriesControl(self.K // 2 + 1, self.ctx.series.rel_tol, self.ctx.series.abs_tol),
                      warn=False)
        C5 = tail_sum(lambda n: tail[n] * p[n],
                      SeriesControl(self.K + 1, self.ctx.series.rel_tol, self.ctx.series.abs_tol),
                      warn=False)
        return Components(w, J1, J2, tail, complex(C4), complex(C5))

    def C4(self, w: complex) -> complex:
        return self.components(w).C4

    def C5(self, w: complex) -> complex:
        return self.components(w).C5

    def phi_W(self, w: complex) -> complex:
        return self.components(w).phi

    def phi_T(self, u: float) -> complex:
        w = w_of_u(u, self.t, self.p)
        return complex(np.exp(1j * u * c1(self.t, self.p)) * self.phi_W(w))


def big_J12(regime: int, u: float, ctx: EvalContext, p: ModelParams) -> complex:
    """Half-line integral of exp(I_j(u, x)) exp(-(lambda - theta) x)."""
    comp = CharFnEngine(ctx, p).components(w_of_u(u, ctx.t, p))
    return comp.J1 if regime == 1 else comp.J2


def big_G(regime: int, u: float, m: int, ctx: EvalContext, p: ModelParams) -> complex:
    """Integral over [0, t] of exp(I_j(u, t - z)) z^{m-1} exp(-(lambda21 - theta) z)."""
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    eng = CharFnEngine(ctx, p)
    I = eng.cumulative_I(regime, w_of_u(u, ctx.t, p), eng.n_t)
    z = eng.h * np.arange(eng.n_t + 1)
    with np.errstate(divide="ignore"):
        kern = np.exp((m - 1) * np.log(z) - eng.rates_q.lambda21 * z) if m > 1 else np.exp(-eng.rates_q.lambda21 * z)
    return complex(np.dot(trapezoid_weights(eng.n_t, eng.h), np.exp(I[::-1]) * kern))


def big_J34(k: int, u: float, ctx: EvalContext, p: ModelParams) -> tuple[complex, complex]:
    """(J3(u, k), J4(u, k)): tail expectations after 2k and 2k + 1 switches.

    J3(u, 0) is exp(I_1(u, t)), the exact tail term when no switch occurred.
    """
    if not 0 <= 2 * k < ctx.trunc.max_switches:
        raise DomainError(f"k must satisfy 0 <= 2k < max_switches, got {k}")
    comp = CharFnEngine(ctx, p).components(w_of_u(u, ctx.t, p))
    return complex(comp.tail[2 * k]), complex(comp.tail[2 * k + 1])


def phi_W(w: complex, ctx: EvalContext, p: ModelParams) -> complex:
    """C4(w, theta) C5(w, theta): characteristic function of W_t at W-variable w."""
    return CharFnEngine(ctx, p).phi_W(w)


def phi_T(u, ctx: EvalContext, p: ModelParams):
    """exp(i u C1(t)) C4 C5, the characteristic function of T_t under the Esscher measure."""
    eng = CharFnEngine(ctx, p)
    if np.ndim(u):
        return np.array([eng.phi_T(float(v)) for v in np.asarray(u, dtype=float)])
    return eng.phi_T(float(u))


# -- historical measure -------------------------------------------------------------
#
# Independent assembly of the untilted product formula: exponents from l_V at
# i f(s), the counting law p_k(t), and the D / C coefficient functions directly.

def _historical_I(noise: NoiseSpec, w: complex, alpha: float, h: float, n_nodes: int) -> np.ndarray:
    s = h * np.arange(n_nodes + 1)
    vals = np.asarray(log_cumulant_V(noise, 1j * _weight(w, alpha, s)))
    if not np.all(np.isfinite(vals)):
        raise NonFiniteIntegrand(f"l_V not finite at w={w}")
    out = np.zeros(n_nodes + 1, dtype=complex)
    out[1:] = np.cumsum(0.5 * h * (vals[1:] + vals[:-1]))
    return out


def phi_W_historical(w: complex, t: float, p: ModelParams, ctx: EvalContext | None = None) -> complex:
    """Characteristic function of W_t under the historical measure (theta = 0 path)."""
    ctx = ctx or EvalContext(t)
    quad, trunc = ctx.quad, ctx.trunc
    lam12, lam21 = p.rates.lambda12, p.rates.lambda21
    n_t = panel_count(0.0, t, quad)
    h = t / n_t
    probs = count_probs(t, p.rates, trunc)
    K = trunc.max_switches

    J = []
    I_t = []
    for noise, lam in ((p.noise1, lam12), (p.noise2, lam21)):
        n_half = min(math.ceil(halfline_cutoff(lam, quad) / h), quad.max_halfline_nodes)
        if w != 0:
            n_half = min(n_half, int((_F_LOG_CAP - math.log(abs(w))) / p.alpha / h))
        n_half = max(n_half, n_t)
        I = _historical_I(noise, w, p.alpha, h, n_half)
        J.append(np.dot(trapezoid_weights(n_half, h), np.exp(I - lam * h * np.arange(n_half + 1))))
        I_t.append(I[: n_t + 1])
    J1, J2 = J

    z = h * np.arange(n_t + 1)
    tw = trapezoid_weights(n_t, h)
    L = trunc.series_terms
    ctrl = SeriesControl(L, ctx.series.rel_tol, ctx.series.abs_tol)

    def G(regime: int, m: int) -> complex:
        with np.errstate(divide="ignore"):
            zm = z ** (m - 1)
        return np.dot(tw, np.exp(I_t[regime - 1][::-1]) * zm * np.exp(-lam21 * z))

    def J3(k: int) -> complex:
        if k == 0:
            return np.exp(I_t[0][-1])
        d = coeff_D(k, -k, 2 * k, p.rates)
        return d * tail_sum(lambda l: coeff_C(k, 2 * k, l, p.rates) * G(1, 2 * k + l) * lam21 ** l, ctrl, warn=False)

    def J4(k: int) -> complex:
        d = coeff_D(k + 1, -k, 2 * k + 1, p.rates)
        return d * tail_sum(lambda l: coeff_C(k + 1, 2 * k + 1, l, p.rates) * G(2, 2 * k + 1 + l) * lam21 ** l,
                            ctrl, warn=False)

    pk = np.append(probs, 0.0)
    outer = SeriesControl(K // 2 + 1, ctx.series.rel_tol, ctx.series.abs_tol)
    first = tail_sum(lambda k: (lam12 * lam21 * J1 * J2) ** k * (pk[2 * k] + lam12 * J1 * pk[2 * k + 1]),
                     outer, warn=False)
    tails = np.empty(K + 1, dtype=complex)
    for k in range(K // 2 + 1):
        tails[2 * k] = J3(k)
        if 2 * k + 1 <= K:
            tails[2 * k + 1] = J4(k)
    second = tail_sum(lambda n: tails[n] * pk[n], SeriesControl(K + 1, ctx.series.rel_tol, ctx.series.abs_tol),
                      warn=False)
    return complex(first * second)


def phi_T_historical(u: float, t: float, p: ModelParams, ctx: EvalContext | None = None) -> complex:
    return complex(np.exp(1j * u * c1(t, p)) * phi_W_historical(w_of_u(u, t, p), t, p, ctx))
