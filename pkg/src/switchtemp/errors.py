"""Exception and warning types raised across the package."""

from __future__ import annotations


class SwitchTempError(Exception):
    """Base class for all package errors."""


class DomainError(SwitchTempError, ValueError):
    """An argument lies outside the domain where a formula is valid."""


class BranchCutError(DomainError):
    """A complex argument fell on the branch cut of Log or sqrt."""


class NonConvergence(SwitchTempError, ArithmeticError):
    """A series did not reach its tolerance within the allowed number of terms."""


class NegativeProbability(SwitchTempError, ArithmeticError):
    """A truncated cdf difference produced a clearly negative probability."""


class DivergentMGF(SwitchTempError, ArithmeticError):
    """The moment generating function of the switch count is not resolved by the truncation."""


class NonFiniteIntegrand(SwitchTempError, ArithmeticError):
    """A quadrature node evaluated to inf or nan."""


class NoBracket(SwitchTempError, ArithmeticError):
    """No sign change of the martingale residual was found on the admissible strip."""


class ConfigError(SwitchTempError, ValueError):
    """A run configuration file is malformed or inconsistent."""


class TruncationWarning(UserWarning):
    """A series or integral was cut before its terms became negligible."""
