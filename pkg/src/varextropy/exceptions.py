"""Exception hierarchy.

The CLI maps these onto exit codes: :class:`ParseError` -> 2,
:class:`DomainError` and subclasses -> 3, :class:`CalibrationRequiredError` -> 4.
"""


class VarextropyError(Exception):
    """Base class for every error raised by this package."""


class ParseError(VarextropyError, ValueError):
    """Malformed user input: distribution spec, sample file, CLI option."""


class DomainError(VarextropyError, ValueError):
    """Arguments outside the mathematical domain of an operation."""


class DegenerateWindowError(DomainError):
    """The truncation window carries no probability (or empirical) mass."""


class DegenerateSampleError(DomainError):
    """The sample cannot support the requested computation (e.g. zero spread)."""


class TieError(DomainError):
    """A zero m-spacing entered the spacing estimator."""

    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"zero spacing at order-statistic index j={index}")


class NoClosedFormError(DomainError):
    """No closed-form expression is implemented for the model."""


class InconsistentSpecError(DomainError):
    """An exponential-family description does not reproduce the model density."""


class PreconditionError(DomainError):
    """A stated precondition of a bound does not hold."""


class SingularWeightError(DomainError):
    """The density vanishes inside the window, so the weight function is undefined."""


class CalibrationRequiredError(VarextropyError, LookupError):
    """No critical value is available for the requested (statistic, n, alpha)."""
