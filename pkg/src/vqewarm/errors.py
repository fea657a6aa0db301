"""Exception types shared across the package."""


class InputError(ValueError):
    """Raised when an argument violates an operation's preconditions."""


class CapacityError(ValueError):
    """Raised when an exhaustive computation would exceed its size guard."""


class NumericalError(ArithmeticError):
    """Raised when a non-finite value shows up during optimization."""
