"""Exception types shared across the package."""


class PbcError(Exception):
    """Base class for all errors raised by pbckit."""


class PauliError(PbcError):
    """Invalid Pauli operator construction or algebra request."""


class CircuitError(PbcError):
    """Invalid circuit text or instruction stream.

    ``line`` is the 1-based source line for parse failures, or None when the
    error was raised on an in-memory circuit.
    """

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class CapacityError(PbcError):
    """Request exceeds what the dense register backend can hold."""


class GenerationError(PbcError):
    """A benchmark instance could not be produced with the given knobs."""


class InternalInvariantError(PbcError):
    """An internal consistency check failed; indicates a bug, not bad input."""
