"""Exception hierarchy shared by all modules."""


class Sl2SumError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(Sl2SumError, ValueError):
    pass


class DomainError(Sl2SumError, ValueError):
    pass


class ArithmeticOverflowError(Sl2SumError, OverflowError):
    """An integer entry left the signed 64-bit range."""


class UnsupportedOperationError(Sl2SumError):
    pass


class DegenerateGeometryError(Sl2SumError):
    pass


class ToleranceNotMetError(Sl2SumError):
    """Quadrature did not reach the requested tolerance.

    ``estimate`` and ``error`` carry the best value obtained.
    """

    def __init__(self, message, estimate, error):
        super().__init__(message)
        self.estimate = estimate
        self.error = error
