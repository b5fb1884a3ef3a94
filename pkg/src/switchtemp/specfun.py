"""Special functions: Pochhammer symbols, Kummer's M and the lower incomplete gamma.

All three are evaluated by their defining series (plus a continued fraction
for the incomplete gamma in its upper range). The array forms broadcast and
iterate until every element has converged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, NonConvergence

__all__ = [
    "SeriesControl",
    "DEFAULT_SERIES",
    "pochhammer",
    "log_pochhammer",
    "kummer_m",
    "lower_incomplete_gamma",
    "log_lower_incomplete_gamma",
]


@dataclass(frozen=True)
class SeriesControl:
    max_terms: int = 500
    rel_tol: float = 1e-12
    abs_tol: float = 1e-300

    def __post_init__(self) -> None:
        if int(self.max_terms) < 1:
            raise DomainError(f"max_terms must be >= 1, got {self.max_terms}")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("series tolerances must be positive")


DEFAULT_SERIES = SeriesControl()


def pochhammer(a: float, l: int) -> float:
    """Rising factorial a(a+1)...(a+l-1), with a^(0) = 1."""
    if l < 0:
        raise DomainError(f"Pochhammer order must be nonnegative, got {l}")
    out = 1.0
    for j in range(int(l)):
        out *= a + j
    return out


def log_pochhammer(a, l):
    """log of the rising factorial for a > 0 (array friendly)."""
    a = np.asarray(a, dtype=float)
    l = np.asarray(l, dtype=float)
    return gammaln(a + l) - gammaln(a)


def kummer_m(a: float, b: float, z, ctrl: SeriesControl = DEFAULT_SERIES, *, return_terms: bool = False):
    """Kummer's confluent hypergeometric function M(a, b, z) by direct summation.

    ``z`` may be a scalar or an array. Summation stops once every element has
    a term below ``rel_tol * |partial| + abs_tol``. With ``return_terms`` the
    number of terms used is returned as well.
    """
    if b <= 0 and float(b).is_integer():
        raise DomainError(f"M(a, b, z) undefined for b = {b}")
    if np.ndim(z) == 0:
        return _kummer_scalar(float(a), float(b), float(z), ctrl, return_terms)
    z_arr = np.asarray(z, dtype=float)
    total = np.ones_like(z_arr)
    term = np.ones_like(z_arr)
    n_used = 1
    for l in range(ctrl.max_terms):
        term = term * ((a + l) / (b + l)) * z_arr / (l + 1)
        total = total + term
        n_used = l + 2
        if np.all(np.abs(term) <= ctrl.rel_tol * np.abs(total) + ctrl.abs_tol):
            break
    else:
        raise NonConvergence(f"M({a}, {b}, z) not converged after {ctrl.max_terms} terms")
    value = total if z_arr.ndim else float(total)
    return (value, n_used) if return_terms else value


def _kummer_scalar(a: float, b: float, z: float, ctrl: SeriesControl, return_terms: bool):
    # same recurrence as the array path, on Python floats
    total = term = 1.0
    for l in range(ctrl.max_terms):
        term *= (a + l) / (b + l) * z / (l + 1)
        total += term
        if abs(term) <= ctrl.rel_tol * abs(total) + ctrl.abs_tol:
            return (total, l + 2) if return_terms else total
    raise NonConvergence(f"M({a}, {b}, z) not converged after {ctrl.max_terms} terms")


def _log_gamma_series(a: np.ndarray, z: np.ndarray, ctrl: SeriesControl) -> np.ndarray:
    # log of z^a e^{-z} sum_n z^n / (a (a+1) ... (a+n)), for z < a + 1
    term = 1.0 / a
    total = term.copy()
    for n in range(1, ctrl.max_terms):
        term = term * z / (a + n)
        total = total + term
        if np.all(term <= ctrl.rel_tol * total):
            break
    else:
        raise NonConvergence("incomplete gamma series did not converge")
    return a * np.log(z) - z + np.log(total)


def _upper_cf(a: np.ndarray, z: np.ndarray, ctrl: SeriesControl) -> np.ndarray:
    # Regularized upper gamma Q(a, z) by the modified Lentz continued fraction, for z >= a + 1
    tiny = 1e-300
    bb = z + 1.0 - a
    c = np.full_like(z, 1.0 / tiny)
    d = 1.0 / bb
    h = d.copy()
    for i in range(1, ctrl.max_terms):
        an = -i * (i - a)
        bb = bb + 2.0
        d = an * d + bb
        d = np.where(np.abs(d) < tiny, tiny, d)
        c = bb + an / c
        c = np.where(np.abs(c) < tiny, tiny, c)
        d = 1.0 / d
        delta = d * c
        h = h * delta
        if np.all(np.abs(delta - 1.0) <= ctrl.rel_tol):
            break
    else:
        raise NonConvergence("incomplete gamma continued fraction did not converge")
    return np.exp(a * np.log(z) - z - gammaln(a)) * h


def _log_lower_gamma_scalar(a: float, z: float, ctrl: SeriesControl) -> float:
    if a <= 0:
        raise DomainError("incomplete gamma requires a > 0")
    if z < 0:
        raise DomainError("incomplete gamma requires z >= 0")
    if z == 0:
        return -math.inf
    if z < a + 1.0:
        term = total = 1.0 / a
        for n in range(1, ctrl.max_terms):
            term *= z / (a + n)
            total += term
            if term <= ctrl.rel_tol * total:
                return a * math.log(z) - z + math.log(total)
        raise NonConvergence("incomplete gamma series did not converge")
    tiny = 1e-300
    bb = z + 1.0 - a
    c, d = 1.0 / tiny, 1.0 / bb
    h = d
    for i in range(1, ctrl.max_terms):
        an = -i * (i - a)
        bb += 2.0
        d = an * d + bb
        d = tiny if abs(d) < tiny else d
        c = bb + an / c
        c = tiny if abs(c) < tiny else c
        d = 1.0 / d
        h *= d * c
        if abs(d * c - 1.0) <= ctrl.rel_tol:
            q = math.exp(a * math.log(z) - z - math.lgamma(a)) * h
            return math.lgamma(a) + math.log1p(-q)
    raise NonConvergence("incomplete gamma continued fraction did not converge")


def log_lower_incomplete_gamma(a, z, ctrl: SeriesControl = DEFAULT_SERIES):
    """log of gamma(a, z) for a > 0, z > 0; returns -inf where z == 0."""
    if np.ndim(a) == 0 and np.ndim(z) == 0:
        return _log_lower_gamma_scalar(float(a), float(z), ctrl)
    a_arr, z_arr = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(z, dtype=float))
    if np.any(a_arr <= 0):
        raise DomainError("incomplete gamma requires a > 0")
    if np.any(z_arr < 0):
        raise DomainError("incomplete gamma requires z >= 0")
    out = np.full(a_arr.shape, -np.inf)
    pos = z_arr > 0
    ser = pos & (z_arr < a_arr + 1.0)
    cf = pos & ~ser
    if np.any(ser):
        out[ser] = _log_gamma_series(a_arr[ser], z_arr[ser], ctrl)
    if np.any(cf):
        q = _upper_cf(a_arr[cf], z_arr[cf], ctrl)
        out[cf] = gammaln(a_arr[cf]) + np.log1p(-q)
    return out if out.ndim else float(out)


def lower_incomplete_gamma(a, z, ctrl: SeriesControl = DEFAULT_SERIES):
    """Lower incomplete gamma: integral of x^(a-1) e^(-x) over [0, z]."""
    return np.exp(log_lower_incomplete_gamma(a, z, ctrl))
