"""Exceptions raised by sqfree_mod"""


class SquareFreeModError(Exception):
    """Base class of every error raised by this package"""


class ArgumentError(SquareFreeModError, ValueError):
    """An argument is outside the domain of the operation"""


class InsufficientLengthError(ArgumentError):
    """A factor length is too small to decide the question"""


class PreconditionError(ArgumentError):
    """A hypothesis of a construction does not hold"""


class ResourceLimitError(SquareFreeModError):
    """A resource guard or scan cap was exceeded"""


class WordFormatError(SquareFreeModError):
    """A word, partial word or morphism file cannot be parsed"""


class VerificationFailure(SquareFreeModError):
    """A certificate-backed step or an independent check did not hold"""

    def __init__(self, message: str, trace: dict = None) -> None:
        super().__init__(message)
        self.trace = dict(trace or {})

    def __str__(self) -> str:
        message = super().__str__()
        if not self.trace:
            return message
        details = ', '.join(f'{key}={value!r}' for key, value in sorted(self.trace.items()))
        return f'{message} ({details})'
