"""Log-cumulant exponents of the Gamma and inverse-Gaussian subordinators and of V = B_R + mu R.

Convention: ``l_X(z) = log E[exp(z X_1)]``, continued analytically with the
principal Log / sqrt branches.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import BranchCutError, DomainError

__all__ = [
    "SubordinatorKind",
    "SubordinatorSpec",
    "NoiseSpec",
    "log_cumulant_R",
    "log_cumulant_R_deriv",
    "log_cumulant_V",
    "real_domain_bound",
]


class SubordinatorKind(str, enum.Enum):
    GAMMA = "gamma"
    INVERSE_GAUSSIAN = "inverse_gaussian"

    @classmethod
    def parse(cls, text: str) -> "SubordinatorKind":
        key = text.strip().lower().replace("-", "_").replace(" ", "_")
        aliases = {"gamma": cls.GAMMA, "ig": cls.INVERSE_GAUSSIAN, "inverse_gaussian": cls.INVERSE_GAUSSIAN,
                   "inversegaussian": cls.INVERSE_GAUSSIAN}
        try:
            return aliases[key]
        except KeyError:
            raise DomainError(f"unknown subordinator kind {text!r}") from None


@dataclass(frozen=True)
class SubordinatorSpec:
    kind: SubordinatorKind
    a: float
    b: float

    def __post_init__(self) -> None:
        if not isinstance(self.kind, SubordinatorKind):
            object.__setattr__(self, "kind", SubordinatorKind.parse(str(self.kind)))
        if not (self.a > 0 and self.b > 0):
            raise DomainError(f"subordinator parameters must be positive, got a={self.a}, b={self.b}")

    @classmethod
    def gamma(cls, a: float, b: float) -> "SubordinatorSpec":
        return cls(SubordinatorKind.GAMMA, a, b)

    @classmethod
    def inverse_gaussian(cls, a: float, b: float) -> "SubordinatorSpec":
        return cls(SubordinatorKind.INVERSE_GAUSSIAN, a, b)

    @property
    def mean_rate(self) -> float:
        """E[R_1]; a/b for both families."""
        return self.a / self.b


@dataclass(frozen=True)
class NoiseSpec:
    subordinator: SubordinatorSpec
    mu1: float = 0.0


def _on_cut(w: np.ndarray) -> np.ndarray:
    # the principal branches of Log and sqrt are discontinuous on (-inf, 0]
    return (w.imag == 0) & (w.real <= 0)


def _branch_argument(spec: SubordinatorSpec, z: np.ndarray) -> np.ndarray:
    if spec.kind is SubordinatorKind.GAMMA:
        w = 1.0 - z / spec.b
    else:
        w = spec.b ** 2 - 2.0 * z
    if np.any(_on_cut(w)):
        bad = np.asarray(z)[_on_cut(w)].ravel()[0]
        raise BranchCutError(f"{spec.kind.value} exponent evaluated on its branch cut at z={bad}")
    return w


def _out(x):
    return x if np.ndim(x) else complex(x)


def log_cumulant_R(spec: SubordinatorSpec, z):
    """Exponent of the subordinator: Gamma -a Log(1 - z/b); IG -a (sqrt(b^2 - 2z) - b)."""
    z = np.asarray(z, dtype=complex)
    w = _branch_argument(spec, z)
    if spec.kind is SubordinatorKind.GAMMA:
        return _out(-spec.a * np.log(w))
    return _out(-spec.a * (np.sqrt(w) - spec.b))


def log_cumulant_R_deriv(spec: SubordinatorSpec, z):
    """d/dz of :func:`log_cumulant_R`: Gamma a/(b - z); IG a/sqrt(b^2 - 2z)."""
    z = np.asarray(z, dtype=complex)
    w = _branch_argument(spec, z)
    if spec.kind is SubordinatorKind.GAMMA:
        return _out(spec.a / (spec.b - z))
    return _out(spec.a / np.sqrt(w))


def log_cumulant_V(spec: NoiseSpec, z):
    """Exponent of V = B_R + mu1 R: l_R(mu1 z + z^2 / 2)."""
    z = np.asarray(z, dtype=complex)
    return log_cumulant_R(spec.subordinator, spec.mu1 * z + 0.5 * z * z)


def real_domain_bound(spec: SubordinatorSpec) -> float:
    """Supremum of real arguments at which the exponent is finite (b for Gamma, b^2/2 for IG)."""
    if spec.kind is SubordinatorKind.GAMMA:
        return spec.b
    return 0.5 * spec.b ** 2
