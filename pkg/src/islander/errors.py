"""Exception types shared across the package."""


class IslanderError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(IslanderError, ValueError):
    """An input value violates a documented invariant.

    The message always names the offending field or argument.
    """


class StepSizeError(IslanderError):
    """Requested integration step is too coarse for the plant time constants."""


class InstabilityError(IslanderError):
    """A simulated trajectory left its physically plausible envelope."""


class InsufficientReserveError(IslanderError):
    """The generator fleet cannot supply the requested reserve slice."""

    def __init__(self, shortfall_mw: float, message: str | None = None):
        self.shortfall_mw = shortfall_mw
        super().__init__(message or f"fleet headroom short by {shortfall_mw:.6g} MW")


class ScenarioFormatError(IslanderError):
    """A scenario, fleet, or bid file failed to parse or validate.

    Carries enough location context (file, line or field) to fix the input.
    """


class PipelineError(IslanderError):
    """A pipeline stage failed; wraps the cause and keeps partial results."""

    def __init__(self, stage: str, cause: Exception, partial: dict | None = None):
        self.stage = stage
        self.cause = cause
        self.partial = partial or {}
        super().__init__(f"stage '{stage}' failed: {cause}")
