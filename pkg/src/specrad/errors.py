"""Exception types shared across the package."""

from __future__ import annotations


class SpecradError(Exception):
    """Base class for all package-specific errors."""


class DomainError(SpecradError, ValueError):
    """An argument is outside the mathematical domain of the operation."""


class DimensionError(DomainError):
    """Array shapes are incompatible with the operation."""


class PreconditionError(DomainError):
    """A stated sample-size or well-posedness precondition is violated."""


class ConvergenceError(SpecradError, RuntimeError):
    """An iterative kernel failed to converge within its sweep budget."""


class SingularDesignError(SpecradError, RuntimeError):
    """The regressor Gram matrix is numerically rank-deficient.

    Carries the offending Gram matrix so the caller can still evaluate the
    infinite-radius certificate for a degenerate design.
    """

    def __init__(self, message: str, gram=None):
        super().__init__(message)
        self.gram = gram


class InfeasibleError(SpecradError, RuntimeError):
    """A sample-size plan has no feasible solution for the requested accuracy.

    ``min_epsilon`` is the exclusive lower bound on the accuracy target below
    which the plan cannot apply, when that threshold is known.
    """

    def __init__(self, message: str, min_epsilon: float | None = None):
        super().__init__(message)
        self.min_epsilon = min_epsilon


class ConfigError(DomainError):
    """An experiment configuration field is missing or invalid."""

    def __init__(self, field: str, message: str):
        super().__init__(f"config field '{field}': {message}")
        self.field = field
