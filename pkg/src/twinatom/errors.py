"""Exception types raised by twinatom."""


class InvalidArgumentError(ValueError):
    """An input lies outside the domain an operation accepts."""


class DegenerateStateError(ArithmeticError):
    """A state has (numerically) zero norm and cannot be renormalized."""


class FitFailureError(RuntimeError):
    """A least-squares fit has no meaningful solution for the given data."""
