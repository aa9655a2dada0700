"""Exception types shared across the package."""


class QummsaError(Exception):
    """Base class for library errors."""


class CircuitError(QummsaError, ValueError):
    """Invalid gate, circuit, or state-vector operation."""


class ParseError(QummsaError, ValueError):
    """Malformed circuit text. Carries the offending line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DataError(QummsaError, ValueError):
    """Invalid dataset: duplicates, out-of-range values, malformed rows."""
