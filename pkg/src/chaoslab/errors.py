"""Exception hierarchy shared by all modules.

PreconditionError marks violated input contracts (CLI exit code 4),
NumericError marks runtime numerical failures such as Newton divergence or
trajectory blow-up (CLI exit code 3).
"""


class ChaoslabError(Exception):
    """Base class for package errors."""


class PreconditionError(ChaoslabError, ValueError):
    """An operation was called outside its documented domain."""


class NumericError(ChaoslabError, RuntimeError):
    """A numerical procedure failed to converge or blew up.

    Attributes carry diagnostic payloads where useful, e.g. ``last_iterate``
    for root finders and ``step`` for integrators.
    """

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        for key, value in diagnostics.items():
            setattr(self, key, value)
