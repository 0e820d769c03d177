"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the set where the quantity is defined."""


class NumericError(ArithmeticError):
    """A numerical procedure failed to reach its tolerance.

    ``estimate`` carries the best value obtained and ``error`` the achieved
    error estimate, when available.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class ExponentOverflowError(NumericError, OverflowError):
    """An exponent exceeded the double-precision guard (700)."""

    def __init__(self, exponent, where="integrand"):
        super().__init__(
            f"exponent {exponent:.6g} in {where} exceeds the overflow guard 700"
        )
        self.exponent = exponent
