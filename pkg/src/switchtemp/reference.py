"""Exact characteristic function of W_t for the two-state chain, by a backward Kolmogorov ODE.

With v_j(s) the conditional transform given regime j at time s,

    -dv/ds = (Q + diag(l_j(s))) v,   v(t) = 1,

and phi_W = v_1(0). Here Q is the generator of the chain and l_j(s) the
(tilted) exponent of regime j at time s. This does not use the factorised
product approximation, so it measures how far that approximation is from
the true law; it is a diagnostic, not the primary evaluation path.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import solve_ivp

from .charfn import _g, tilt_offset, w_of_u
from .errors import NonConvergence
from .model import EvalContext, ModelParams, c1
from .noise import log_cumulant_R

__all__ = ["phi_W_exact", "phi_T_exact"]


def phi_W_exact(w: complex, ctx: EvalContext, p: ModelParams, rtol: float = 1e-10) -> complex:
    ctx.check(p)
    r = p.rates.tilted(ctx.theta)
    Q = np.array([[-r.lambda12, r.lambda12], [r.lambda21, -r.lambda21]], dtype=complex)
    kappa = (tilt_offset(p.noise1, ctx.theta), tilt_offset(p.noise2, ctx.theta))
    t = ctx.t

    def exponent(regime: int, s: float) -> complex:
        noise = p.noise(regime)
        return complex(log_cumulant_R(noise.subordinator, _g(noise.mu1, w * np.exp(p.alpha * s), ctx.theta))) \
            - kappa[regime - 1]

    def rhs(tau, v):
        s = t - tau
        return Q @ v + np.array([exponent(1, s), exponent(2, s)]) * v

    sol = solve_ivp(rhs, (0.0, t), np.ones(2, dtype=complex), method="DOP853", rtol=rtol, atol=1e-14)
    if not sol.success:
        raise NonConvergence(f"backward equation failed: {sol.message}")
    return complex(sol.y[0, -1])


def phi_T_exact(u: float, ctx: EvalContext, p: ModelParams) -> complex:
    return complex(np.exp(1j * u * c1(ctx.t, p)) * phi_W_exact(w_of_u(u, ctx.t, p), ctx, p))
