"""Trapezoid quadrature, half-line cutoffs and tail-controlled sums."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, NonFiniteIntegrand, TruncationWarning
from .specfun import DEFAULT_SERIES, SeriesControl

__all__ = [
    "QuadratureConfig",
    "DEFAULT_QUADRATURE",
    "panel_count",
    "trapezoid",
    "trapezoid_weights",
    "halfline_cutoff",
    "halfline_integral",
    "tail_sum",
]


@dataclass(frozen=True)
class QuadratureConfig:
    """Trapezoid density and the half-line envelope cutoff.

    ``max_halfline_nodes`` caps the node count of a half-line integral when
    the decay rate is tiny; integrals cut by the cap raise a
    :class:`TruncationWarning` if the integrand is not yet negligible there.
    """

    nodes_per_unit: int = 256
    min_nodes: int = 64
    halfline_envelope_tol: float = 1e-12
    max_halfline_nodes: int = 1 << 18

    def __post_init__(self) -> None:
        if self.nodes_per_unit < 8:
            raise DomainError("nodes_per_unit must be >= 8")
        if self.min_nodes < 16:
            raise DomainError("min_nodes must be >= 16")
        if not (0 < self.halfline_envelope_tol <= 1e-6):
            raise DomainError("halfline_envelope_tol must lie in (0, 1e-6]")
        if self.max_halfline_nodes < self.min_nodes:
            raise DomainError("max_halfline_nodes must be >= min_nodes")


DEFAULT_QUADRATURE = QuadratureConfig()


def panel_count(lo: float, hi: float, cfg: QuadratureConfig) -> int:
    return max(cfg.min_nodes, math.ceil((hi - lo) * cfg.nodes_per_unit))


def trapezoid_weights(n: int, h: float) -> np.ndarray:
    """Composite trapezoid weights for n panels of width h (n + 1 nodes)."""
    w = np.full(n + 1, h)
    w[0] = w[-1] = 0.5 * h
    return w


def _check_finite(values: np.ndarray) -> None:
    if not np.all(np.isfinite(values)):
        bad = int(np.flatnonzero(~np.isfinite(values))[0])
        raise NonFiniteIntegrand(f"integrand is not finite at node {bad}")


def trapezoid(f: Callable[[np.ndarray], np.ndarray], lo: float, hi: float,
              cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> complex:
    """Composite trapezoid rule of a vectorised integrand over [lo, hi]."""
    if hi < lo:
        raise DomainError(f"trapezoid needs lo <= hi, got [{lo}, {hi}]")
    if hi == lo:
        return 0.0
    n = panel_count(lo, hi, cfg)
    x = np.linspace(lo, hi, n + 1)
    y = np.asarray(f(x))
    _check_finite(y)
    val = np.dot(trapezoid_weights(n, (hi - lo) / n), y)
    return complex(val) if np.iscomplexobj(val) else float(val)


def halfline_cutoff(decay_rate: float, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Upper limit where the envelope exp(-decay_rate * x) drops below the tolerance."""
    if not decay_rate > 0:
        raise DomainError(f"half-line integral needs a positive decay rate, got {decay_rate}")
    return -math.log(cfg.halfline_envelope_tol) / decay_rate


def halfline_integral(f: Callable[[np.ndarray], np.ndarray], decay_rate: float,
                      cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> complex:
    """Integral over [0, inf) of an integrand bounded by C * exp(-decay_rate * x)."""
    x_max = halfline_cutoff(decay_rate, cfg)
    n = panel_count(0.0, x_max, cfg)
    if n > cfg.max_halfline_nodes:
        n = cfg.max_halfline_nodes
        x_max = n / cfg.nodes_per_unit
    x = np.linspace(0.0, x_max, n + 1)
    y = np.asarray(f(x))
    _check_finite(y)
    scale = np.max(np.abs(y))
    if scale > 0 and abs(y[-1]) > cfg.halfline_envelope_tol * scale * 1e3:
        warnings.warn(f"half-line integral cut at x={x_max:.4g} with |f|={abs(y[-1]):.3g}",
                      TruncationWarning, stacklevel=2)
    val = np.dot(trapezoid_weights(n, x_max / n), y)
    return complex(val) if np.iscomplexobj(val) else float(val)


def tail_sum(term: Callable[[int], complex], ctrl: SeriesControl = DEFAULT_SERIES,
             *, start: int = 0, warn: bool = True) -> complex:
    """Sum term(start), term(start+1), ... until three consecutive terms are negligible.

    A term is negligible when ``|term| < rel_tol * |partial| + abs_tol``. If
    ``max_terms`` terms are used first, a :class:`TruncationWarning` carries the
    magnitude of the last term.
    """
    total = 0.0
    small_run = 0
    last = 0.0
    for k in range(start, start + ctrl.max_terms):
        last = term(k)
        total = total + last
        if abs(last) < ctrl.rel_tol * abs(total) + ctrl.abs_tol:
            small_run += 1
            if small_run >= 3:
                return total
        else:
            small_run = 0
    if warn:
        warnings.warn(f"tail_sum stopped at max_terms={ctrl.max_terms}; last |term|={abs(last):.3g}",
                      TruncationWarning, stacklevel=2)
    return total
