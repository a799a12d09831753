"""Exception types shared by the numerical modules and the command line."""


class DensinvError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(DensinvError, ValueError):
    """Array shapes or meshes do not line up."""


class DomainError(DensinvError, ValueError):
    """An input lies outside the domain of an operation (e.g. a nonpositive density)."""


class ContractViolation(DensinvError, ValueError):
    """A documented precondition on the input data does not hold."""


class InvariantViolation(DensinvError, AssertionError):
    """An inequality that must hold mathematically was observed to fail."""


class NumericError(DensinvError, ArithmeticError):
    """A numerical procedure failed (non-finite values, no convergence, ...)."""


class DivergenceError(NumericError):
    """The fixed-point iteration left its basin; carries the report gathered so far."""

    def __init__(self, message, report=None, last_iterate=None):
        super().__init__(message)
        self.report = report
        self.last_iterate = last_iterate
