"""Shared exception and warning types."""
from __future__ import annotations


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class UnsupportedRangeError(ValueError):
    """The argument is mathematically valid but outside the supported range."""


class PreconditionError(ValueError):
    """A structural precondition on the input data is violated."""


class NumericalError(RuntimeError):
    """A numerical procedure failed to reach its accuracy or convergence target."""


class NonContractionError(NumericalError):
    """Fixed-point iteration showed no contraction within the iteration budget."""


class BracketingError(RuntimeError):
    """A root/threshold bracketing procedure could not establish a valid bracket."""


class ResolutionWarning(UserWarning):
    """The discretization looks too coarse for the requested computation."""
