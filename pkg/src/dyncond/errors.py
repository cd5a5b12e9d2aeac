"""Exception types shared across the package."""


class NetworkError(ValueError):
    """A network violates a structural or numeric invariant."""


class ParseError(NetworkError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class StructuralError(RuntimeError):
    """An algorithm was applied to a network shape it does not support."""


class EnumerationLimitError(RuntimeError):
    pass


class AbstractionInconsistent(RuntimeError):
    """Zero-rank propagation left some variable without a possible value."""

    def __init__(self, variable):
        self.variable = variable
        super().__init__(
            f"abstraction is inconsistent: every value of {variable!r} is impossible "
            "(epsilon too aggressive)"
        )
