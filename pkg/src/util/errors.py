"""
Error hierarchy shared by the library, the harness and the service surfaces.
"""
from typing import Optional


class KnnMeasureError(Exception):
    """Base class for every error raised on purpose by this package."""


class InvalidArgumentError(KnnMeasureError, ValueError):
    """An argument lies outside the domain of the operation (k out of range, u outside (0,1), ...)."""


class InvalidSpecError(KnnMeasureError, ValueError):
    """An experiment spec passed schema validation but cannot be run as written."""


class UnsupportedModelError(KnnMeasureError):
    """An analytic quantity was requested from a source that does not provide it."""


class NumericError(KnnMeasureError, ArithmeticError):
    """A numeric evaluation produced a non-finite or undefined value."""

    def __init__(self, message: str, index: Optional[int] = None):
        super().__init__(message)
        self.index = index


class EmptyBallError(NumericError):
    """The Nadaraya-Watson ball holds no sample point, so the ratio is 0/0."""


class DegenerateFunctionalError(NumericError):
    """A functional has zero limiting variance where a standardization needs it."""
