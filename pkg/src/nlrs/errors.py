"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class NlrsError(Exception):
    """Base class for every error raised by the package."""


class PrecisionCapExceeded(NlrsError):
    """Refinement needed more bits than the configured cap allows.

    ``best`` carries whatever enclosure had been achieved when the cap hit,
    so callers can report it instead of guessing.
    """

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class NotReal(NlrsError):
    pass


class DivisionByZero(NlrsError, ZeroDivisionError):
    pass


class PreconditionViolated(NlrsError, ValueError):
    pass


class Unsupported(NlrsError):
    """The input lies outside the fragment the engine can decide."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class Unbounded(Unsupported):
    def __init__(self, reason: str = "unbounded"):
        super().__init__(reason)


class ControlOutOfBand(NlrsError, ValueError):
    pass


class InsufficientExpansion(NlrsError):
    pass


class ParseError(NlrsError, ValueError):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
