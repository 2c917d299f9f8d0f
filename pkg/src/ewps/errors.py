"""Exception types raised across the package."""


class DomainError(ValueError):
    """A parameter or argument lies outside its admissible domain."""


class TruncationError(RuntimeError):
    """An infinite mixture series needs more terms than the configured cap."""


class NonexistentMomentError(ArithmeticError):
    """The requested moment is infinite for the given parameters."""


class DivergenceError(ArithmeticError):
    """A series or integral failed to converge."""


class InsufficientDataError(ValueError):
    """Too few observations to identify the requested model."""
