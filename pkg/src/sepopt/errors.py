"""Exception types raised across the package."""


class DimensionError(ValueError):
    """Operand shapes or qubit counts do not match."""


class ResourceError(MemoryError):
    """A dense materialization or allocation would exceed the configured cap."""


class ConvergenceError(RuntimeError):
    """An iterative solver gave up; ``best`` holds the last estimate."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class DegenerateGramError(ArithmeticError):
    """No Gram eigenvalue survived the cutoff (or a lift collapsed to zero)."""

    def __init__(self, message, party=None):
        super().__init__(message)
        self.party = party


class UndefinedMeasureError(ArithmeticError):
    """The entanglement measure has a zero denominator."""
