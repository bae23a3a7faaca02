"""Exception hierarchy.  Each class maps to one CLI exit code."""


class FrameDecompError(Exception):
    exit_code = 2


class InputError(FrameDecompError, ValueError):
    """Malformed input: shapes, labels, partitions, file contents."""

    exit_code = 2


class PreconditionError(FrameDecompError, ValueError):
    """Well-formed input that violates an operation's precondition."""

    exit_code = 3

    def __init__(self, message, precondition=None):
        super().__init__(message)
        self.precondition = precondition
