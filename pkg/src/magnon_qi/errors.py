"""Exception hierarchy shared across the package."""


class MagnonQIError(Exception):
    """Base class for package errors."""


class DomainError(MagnonQIError, ValueError):
    """Input outside the mathematical or physical domain of an operation."""


class UnstableRegimeError(DomainError):
    """Parameters violate the steady-state condition 1 + Lambda_b - Lambda_a > 0."""


class ConventionError(DomainError):
    """Quantity requested outside the convention it is defined for (e.g. CM at omega != 0)."""


class NumericalError(MagnonQIError, ArithmeticError):
    """An iterative or consistency check failed numerically."""


class ConfigError(MagnonQIError, ValueError):
    """Invalid sweep configuration document."""

    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        where = []
        if key is not None:
            where.append(f"key '{key}'")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
