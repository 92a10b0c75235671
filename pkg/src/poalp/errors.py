"""Exception hierarchy. The CLI maps each class to a stable exit code."""


class PoaError(Exception):
    exit_code = 5


class InvalidArgumentError(PoaError, ValueError):
    exit_code = 2


class PreconditionError(PoaError):
    exit_code = 3


class ResourceLimitError(PoaError):
    exit_code = 4


class InternalError(PoaError):
    """A result these programs can never legitimately produce (e.g. an unbounded PoA LP)."""

    exit_code = 5


class NumericFailure(InternalError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
