"""Exception hierarchy.

Every numerical failure is a :class:`QSeriesError`; domain violations are
additionally ``ValueError`` so plain ``except ValueError`` callers keep working.
"""

from __future__ import annotations


class QSeriesError(Exception):
    """Base class for all library errors."""


class DomainError(QSeriesError, ValueError):
    """Input outside the region where the requested quantity is defined."""


class DivisionByVanishingFactor(DomainError):
    """A factor 1 - a*q^k in a denominator is numerically zero (resonant parameter)."""


class ZeroArgument(DomainError):
    pass


class OutsideConvergenceDomain(DomainError):
    pass


class DivergentSeries(DomainError):
    """Unilateral series with r - s > 1 (radius of convergence zero)."""


class DivergentAtOrigin(DomainError):
    """Bilateral series with more numerator than denominator parameters."""


class SpiralCollision(DomainError):
    """Evaluation point lies on the forbidden spiral -lambda*q^Z."""


class ThetaPole(DomainError):
    pass


class ThetaZero(DomainError):
    pass


class PoleInProduct(DomainError):
    pass


class ResonantParameters(DomainError):
    """Parameter ratios fall on q^Z where a closed form is undefined."""


class MaxTermsExceeded(QSeriesError, ArithmeticError):
    def __init__(self, message: str, side: str | None = None, terms: int | None = None):
        super().__init__(message)
        self.side = side
        self.terms = terms


class ConfigError(QSeriesError, ValueError):
    pass
