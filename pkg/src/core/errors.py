"""
Exception hierarchy shared by all solvers.
"""


class SolverError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(SolverError, ValueError):
    """A problem, parameter or file violates a precondition."""


class DimensionMismatchError(InvalidInputError):
    """Two operands have incompatible shapes."""

    def __init__(self, what: str, expected: int, got: int):
        super().__init__(f"{what}: expected length {expected}, got {got}")
        self.expected = expected
        self.got = got


class NumericalAbortError(SolverError, ArithmeticError):
    """A run produced a non-finite value or hit a breakdown."""

    def __init__(self, message: str, iteration: int | None = None, coordinate: int | None = None):
        details = []
        if iteration is not None:
            details.append(f"k={iteration}")
        if coordinate is not None:
            details.append(f"i={coordinate}")
        if details:
            message = f"{message} ({', '.join(details)})"
        super().__init__(message)
        self.iteration = iteration
        self.coordinate = coordinate


class UnsupportedOperationError(SolverError, NotImplementedError):
    """The oracle does not provide the requested capability."""
