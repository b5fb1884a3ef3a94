"""Model constants, evaluation context, seasonal mean and the deterministic OU part."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError
from .noise import NoiseSpec, SubordinatorSpec
from .numerics import DEFAULT_QUADRATURE, QuadratureConfig
from .regimes import DEFAULT_TRUNCATION, CountTruncation, RegimeRates
from .specfun import DEFAULT_SERIES, SeriesControl

__all__ = ["ModelParams", "EvalContext", "seasonal", "c1", "desk_params"]

SEASON_DAYS = 365.0


@dataclass(frozen=True)
class ModelParams:
    """Constants of the switching mean-reverting temperature model.

    ``beta`` holds the seasonal coefficients (level, trend, sine, cosine);
    the noise of regime j is ``noise{j}``. The chain starts in regime 1.
    """

    alpha: float
    sigma: float
    beta: tuple[float, float, float, float]
    noise1: NoiseSpec
    noise2: NoiseSpec
    rates: RegimeRates
    r: float = 0.0
    T0: float = 0.0

    def __post_init__(self) -> None:
        if not self.alpha > 0:
            raise DomainError(f"alpha must be positive, got {self.alpha}")
        if not self.sigma > 0:
            raise DomainError(f"sigma must be positive, got {self.sigma}")
        if self.r < 0:
            raise DomainError(f"r must be nonnegative, got {self.r}")
        beta = tuple(float(b) for b in self.beta)
        if len(beta) != 4:
            raise DomainError("beta needs exactly four coefficients")
        object.__setattr__(self, "beta", beta)

    def noise(self, regime: int) -> NoiseSpec:
        if regime == 1:
            return self.noise1
        if regime == 2:
            return self.noise2
        raise DomainError(f"regime must be 1 or 2, got {regime}")

    def rate_out(self, regime: int) -> float:
        """Intensity of leaving ``regime``."""
        return self.rates.lambda12 if regime == 1 else self.rates.lambda21


@dataclass(frozen=True)
class EvalContext:
    t: float
    theta: float = 0.0
    trunc: CountTruncation = field(default=DEFAULT_TRUNCATION)
    quad: QuadratureConfig = field(default=DEFAULT_QUADRATURE)
    series: SeriesControl = field(default=DEFAULT_SERIES)

    def __post_init__(self) -> None:
        if not self.t > 0:
            raise DomainError(f"horizon t must be positive, got {self.t}")

    def check(self, p: ModelParams) -> None:
        if not self.theta < p.rates.lambda12:
            raise DomainError(
                f"theta={self.theta} must be below lambda12={p.rates.lambda12}")


def seasonal(t: float, p: ModelParams) -> float:
    b0, b1, b2, b3 = p.beta
    w = 2.0 * math.pi * t / SEASON_DAYS
    return b0 + b1 * t + b2 * math.sin(w) + b3 * math.cos(w)


def c1(t: float, p: ModelParams) -> float:
    """Deterministic part s_t + e^{-alpha t} (T0 - s_0)."""
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    return seasonal(t, p) + math.exp(-p.alpha * t) * (p.T0 - seasonal(0.0, p))


def desk_params(**overrides) -> ModelParams:
    """Illustrative default parameter set; only the switching rates come from published figures."""
    base = dict(
        alpha=2.0,
        sigma=1.0,
        beta=(15.0, 0.0, 5.0, 2.0),
        noise1=NoiseSpec(SubordinatorSpec.gamma(4.0, 4.0), 0.1),
        noise2=NoiseSpec(SubordinatorSpec.gamma(8.0, 4.0), -0.1),
        rates=RegimeRates(10.0, 20.0),
        r=0.02,
        T0=16.0,
    )
    base.update(overrides)
    return ModelParams(**base)
