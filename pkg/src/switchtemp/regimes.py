"""Law of the regime switches: switching-time densities and cdfs, counts, tilted counts.

The chain starts in regime 1 and alternates; holding times are Exp(lambda12)
in regime 1 and Exp(lambda21) in regime 2. The k-th switching time is the sum
of ceil(k/2) regime-1 and floor(k/2) regime-2 holding times, whose density is
a Kummer-M expression; its cdf is a series of lower incomplete gammas.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .errors import DivergentMGF, DomainError, NegativeProbability, TruncationWarning
from .specfun import DEFAULT_SERIES, SeriesControl, kummer_m, log_lower_incomplete_gamma, log_pochhammer

__all__ = [
    "RegimeRates",
    "CountTruncation",
    "DEFAULT_TRUNCATION",
    "coeff_D",
    "coeff_C",
    "tau_pdf",
    "tau_cdf",
    "tau_cdf_table",
    "count_prob",
    "count_probs",
    "count_mgf",
    "tilted_count_prob",
    "tilted_count_probs",
    "odd_count_prob",
    "expected_count",
    "expected_half_count",
]

NEGATIVE_CLAMP = 1e-10
MGF_TAIL_TOL = 1e-8


@dataclass(frozen=True)
class RegimeRates:
    """Switching intensities; the density formulas need lambda21 > lambda12 > 0."""

    lambda12: float
    lambda21: float

    def __post_init__(self) -> None:
        if not (self.lambda21 > self.lambda12 > 0):
            raise DomainError(
                f"rates must satisfy lambda21 > lambda12 > 0, got lambda12={self.lambda12}, "
                f"lambda21={self.lambda21}")

    def tilted(self, theta: float) -> "RegimeRates":
        """Rates of the holding times under the Esscher measure (both shifted by -theta)."""
        if theta == 0:
            return self
        if not theta < self.lambda12:
            raise DomainError(f"theta={theta} must be below lambda12={self.lambda12}")
        return RegimeRates(self.lambda12 - theta, self.lambda21 - theta)


@dataclass(frozen=True)
class CountTruncation:
    max_switches: int = 40
    series_terms: int = 40

    def __post_init__(self) -> None:
        if self.max_switches < 2 or self.max_switches % 2:
            raise DomainError(f"max_switches must be an even integer >= 2, got {self.max_switches}")
        if self.series_terms < 1:
            raise DomainError(f"series_terms must be >= 1, got {self.series_terms}")


DEFAULT_TRUNCATION = CountTruncation()


def coeff_D(m: float, n: float, l: int, rates: RegimeRates, theta: float = 0.0) -> float:
    """lambda12^m / (lambda21^n Gamma(l)), zero for l = 0; theta shifts both rates."""
    if l < 0:
        raise DomainError(f"l must be nonnegative, got {l}")
    if l == 0:
        return 0.0
    r = rates.tilted(theta)
    return r.lambda12 ** m / (r.lambda21 ** n * math.gamma(l))


def coeff_C(m: float, n: float, l: int, rates: RegimeRates, theta: float = 0.0) -> float:
    """m^(l) (1 - lambda12/lambda21)^l / (n^(l) l!), equal to 1 for l = 0."""
    if l < 0:
        raise DomainError(f"l must be nonnegative, got {l}")
    if l == 0:
        return 1.0
    r = rates.tilted(theta)
    rho = 1.0 - r.lambda12 / r.lambda21
    out = rho ** l / math.factorial(l)
    for j in range(l):
        out *= (m + j) / (n + j)
    return out


def _shape(k_index: int) -> tuple[int, int]:
    # number of regime-1 and regime-2 holding times making up tau_k
    return (k_index + 1) // 2, k_index // 2


def tau_pdf(k_index: int, x, rates: RegimeRates, ctrl: SeriesControl = DEFAULT_SERIES,
            theta: float = 0.0):
    """Density of the k_index-th switching time (k_index >= 1), optionally with tilted rates."""
    if k_index < 1:
        raise DomainError(f"k_index must be >= 1, got {k_index}")
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0):
        raise DomainError("tau_pdf needs x >= 0")
    r = rates.tilted(theta)
    m1, m2 = _shape(k_index)
    log_pref = m1 * math.log(r.lambda12) + m2 * math.log(r.lambda21) - math.lgamma(k_index)
    kum = kummer_m(m1, k_index, (r.lambda21 - r.lambda12) * x_arr, ctrl)
    with np.errstate(divide="ignore"):
        log_body = (k_index - 1) * np.log(x_arr) if k_index > 1 else np.zeros_like(x_arr)
    out = np.exp(log_pref + log_body - r.lambda21 * x_arr) * kum
    return out if out.ndim else float(out)


def _cdf_log_terms(k_index: int, t: float, rates: RegimeRates, n_terms: int,
                   ctrl: SeriesControl) -> np.ndarray:
    # log of D(m, m, K) C(m, K, l) gamma(K + l, lambda21 t) for l = 0 .. n_terms-1
    m1, _ = _shape(k_index)
    l = np.arange(n_terms, dtype=float)
    log_d = m1 * (math.log(rates.lambda12) - math.log(rates.lambda21)) - math.lgamma(k_index)
    log_rho = math.log1p(-rates.lambda12 / rates.lambda21)
    log_c = log_pochhammer(m1, l) - log_pochhammer(k_index, l) - gammaln(l + 1) + l * log_rho
    return log_d + log_c + log_lower_incomplete_gamma(k_index + l, rates.lambda21 * t, ctrl)


def tau_cdf(k_index: int, t: float, rates: RegimeRates, trunc: CountTruncation = DEFAULT_TRUNCATION,
            theta: float = 0.0, ctrl: SeriesControl = DEFAULT_SERIES, warn_tol: float = 1e-12) -> float:
    """Cdf of the k_index-th switching time from the incomplete-gamma series.

    ``tau_cdf(0, t) = 1``. The l-series is cut at ``trunc.series_terms``; a
    :class:`TruncationWarning` is issued when the last included term exceeds
    ``warn_tol``.
    """
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    if k_index < 0:
        raise DomainError(f"k_index must be >= 0, got {k_index}")
    if k_index == 0:
        return 1.0
    if t == 0:
        return 0.0
    r = rates.tilted(theta)
    terms = np.exp(_cdf_log_terms(k_index, t, r, trunc.series_terms, ctrl))
    if terms[-1] > warn_tol:
        warnings.warn(f"tau_cdf(k={k_index}, t={t}) truncated with last term {terms[-1]:.3g}",
                      TruncationWarning, stacklevel=2)
    return float(min(terms.sum(), 1.0))


@lru_cache(maxsize=256)
def _cdf_table(t: float, lambda12: float, lambda21: float, max_switches: int, series_terms: int,
               ctrl: SeriesControl) -> np.ndarray:
    rates = RegimeRates(lambda12, lambda21)
    trunc = CountTruncation(max_switches, series_terms)
    table = np.array([tau_cdf(k, t, rates, trunc, ctrl=ctrl) for k in range(max_switches + 2)])
    table.setflags(write=False)
    return table


def tau_cdf_table(t: float, rates: RegimeRates, trunc: CountTruncation = DEFAULT_TRUNCATION,
                  theta: float = 0.0, ctrl: SeriesControl = DEFAULT_SERIES) -> np.ndarray:
    """F_{tau_k}(t) for k = 0 .. max_switches + 1 (read-only, memoised)."""
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    r = rates.tilted(theta)
    return _cdf_table(float(t), r.lambda12, r.lambda21, trunc.max_switches, trunc.series_terms, ctrl)


def _clamp(p: np.ndarray) -> np.ndarray:
    if np.any(p < -NEGATIVE_CLAMP):
        k = int(np.flatnonzero(p < -NEGATIVE_CLAMP)[0])
        raise NegativeProbability(f"p_{k} = {p[k]:.3g}; increase series_terms")
    return np.maximum(p, 0.0)


def count_probs(t: float, rates: RegimeRates, trunc: CountTruncation = DEFAULT_TRUNCATION) -> np.ndarray:
    """P(N_t = k) for k = 0 .. max_switches."""
    F = tau_cdf_table(t, rates, trunc)
    return _clamp(F[:-1] - F[1:])


def count_prob(k: int, t: float, rates: RegimeRates, trunc: CountTruncation = DEFAULT_TRUNCATION) -> float:
    """P(N_t = k) = F_{tau_k}(t) - F_{tau_{k+1}}(t)."""
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    if k <= trunc.max_switches:
        return float(count_probs(t, rates, trunc)[k])
    diff = tau_cdf(k, t, rates, trunc) - tau_cdf(k + 1, t, rates, trunc)
    return float(_clamp(np.array([diff]))[0])


def _mgf_terms(theta: float, t: float, rates: RegimeRates, trunc: CountTruncation) -> np.ndarray:
    p = count_probs(t, rates, trunc)
    k = np.arange(p.size)
    with np.errstate(over="ignore"):
        terms = np.exp(theta * k) * p
    total = terms.sum()
    if not np.isfinite(total) or terms[-1] > MGF_TAIL_TOL * total:
        raise DivergentMGF(
            f"MGF of N_t at theta={theta}, t={t} not resolved by max_switches={trunc.max_switches}")
    return terms


def count_mgf(theta: float, t: float, rates: RegimeRates, trunc: CountTruncation = DEFAULT_TRUNCATION) -> float:
    """E[exp(theta N_t)] summed over the truncated count range."""
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    if theta == 0 or t == 0:
        return 1.0
    return float(_mgf_terms(theta, t, rates, trunc).sum())


def tilted_count_probs(t: float, theta: float, rates: RegimeRates,
                       trunc: CountTruncation = DEFAULT_TRUNCATION) -> np.ndarray:
    """Esscher-tilted count law exp(theta k) p_k(t) / M(theta), k = 0 .. max_switches."""
    if theta == 0 or t == 0:
        return count_probs(t, rates, trunc)
    terms = _mgf_terms(theta, t, rates, trunc)
    return terms / terms.sum()


def tilted_count_prob(k: int, t: float, theta: float, rates: RegimeRates,
                      trunc: CountTruncation = DEFAULT_TRUNCATION) -> float:
    if not 0 <= k <= trunc.max_switches:
        raise DomainError(f"k must lie in [0, {trunc.max_switches}], got {k}")
    return float(tilted_count_probs(t, theta, rates, trunc)[k])


def odd_count_prob(t: float, theta: float, rates: RegimeRates,
                   trunc: CountTruncation = DEFAULT_TRUNCATION) -> float:
    """Tilted probability of an odd number of switches in [0, t)."""
    return float(tilted_count_probs(t, theta, rates, trunc)[1::2].sum())


def expected_count(t: float, theta: float, rates: RegimeRates,
                   trunc: CountTruncation = DEFAULT_TRUNCATION) -> float:
    """Sum of k p^theta_k(t)."""
    p = tilted_count_probs(t, theta, rates, trunc)
    return float(np.dot(np.arange(p.size), p))


def expected_half_count(t: float, theta: float, rates: RegimeRates,
                        trunc: CountTruncation = DEFAULT_TRUNCATION) -> float:
    """Sum of floor(k/2) p^theta_k(t): the expected number of completed switch pairs."""
    p = tilted_count_probs(t, theta, rates, trunc)
    return float(np.dot(np.arange(p.size) // 2, p))
