"""Exception taxonomy shared across the engine.

NumericError subclasses map to CLI exit code 2, spec/input validation
errors to exit code 1.
"""


class HypframeError(Exception):
    """Base class for all engine errors."""


class InvalidInputError(HypframeError, ValueError):
    """Caller passed a value outside an operation's precondition."""


class NumericError(HypframeError):
    """A numerically detected failure (domain, degeneracy, drift)."""


class FrameDegenerateError(NumericError):
    """a^2 + b^2 vanishes: the rotated normal pair is undefined."""


class SurfaceUndefinedError(NumericError):
    """The requested surface does not exist at this parameter."""


class EvoluteUndefinedError(SurfaceUndefinedError):
    """The evolute's sign condition on sigma_F fails here."""


class IntegrationFailureError(NumericError):
    """Frame drift survived re-orthonormalization."""

    def __init__(self, message, worst_t=None):
        super().__init__(message)
        self.worst_t = worst_t
