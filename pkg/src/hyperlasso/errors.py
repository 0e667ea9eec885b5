"""Exception types raised across the package."""


class HyperlassoError(Exception):
    """Base class for all package errors."""


class InvalidArgument(HyperlassoError, ValueError):
    pass


class ParseError(HyperlassoError, ValueError):
    """A data file could not be parsed; ``lineno`` is 1-based."""

    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


class ValidationError(HyperlassoError, ValueError):
    pass


class ExactnessError(HyperlassoError):
    """A quadrature rule failed its exactness check."""

    def __init__(self, message, residual=None, worst=None):
        super().__init__(message)
        self.residual = residual
        self.worst = worst


class EvaluationError(HyperlassoError, ArithmeticError):
    pass


class ConfigError(HyperlassoError, ValueError):
    pass


class InvariantViolation(HyperlassoError, AssertionError):
    """A numerical identity that must hold for every run did not."""
