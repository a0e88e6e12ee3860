"""Exception types shared across the library."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class AccuracyError(RuntimeError):
    """A numerical routine could not reach the requested tolerance.

    Carries the best available estimate so callers can decide whether the
    partial result is still usable.
    """

    def __init__(self, message, value=None, err_estimate=None):
        super().__init__(message)
        self.value = value
        self.err_estimate = err_estimate


class NearResonanceError(RuntimeError):
    """The Lippmann-Schwinger system is numerically singular (candidate k in Lambda)."""

    def __init__(self, message, rcond=None):
        super().__init__(message)
        self.rcond = rcond
