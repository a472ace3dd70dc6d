"""Exception types shared across the package.

The hierarchy mirrors how failures are reported: bad inputs raise
:class:`ParameterError`, runs that produce non-finite numbers raise
:class:`NumericalError`, and the command-line layer maps these onto
process exit codes.
"""

from __future__ import annotations

__all__ = [
    "GravbellError",
    "ParameterError",
    "StepSizeError",
    "CalibrationError",
    "UndefinedCorrelationError",
    "NumericalError",
    "NormalizationError",
]


class GravbellError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(GravbellError, ValueError):
    """An argument is outside its documented domain."""


class StepSizeError(ParameterError):
    """Integrator step too coarse for the stiffest oscillation present."""


class CalibrationError(ParameterError):
    """Ensemble action cannot be rescaled to the requested target."""


class UndefinedCorrelationError(ParameterError):
    """Correlation requested for a degenerate (zero-variance) signal."""


class NumericalError(GravbellError, ArithmeticError):
    """A computation produced NaN or infinity."""


class NormalizationError(GravbellError, ValueError):
    """A field cannot be normalized (zero, negative, or non-finite norm)."""
