"""Exception hierarchy shared by all engines."""


class NodimError(Exception):
    """Base class for every error raised by the package."""


class InputError(NodimError, ValueError):
    """Malformed arguments: wrong dimension, out-of-range parameter, bad schema."""


class DomainError(NodimError, ValueError):
    """A mathematically undefined request, e.g. the norming functional of 0."""


class PreconditionError(NodimError):
    """An operation's stated precondition does not hold for the given data."""


class ContractError(NodimError):
    """A guaranteed postcondition failed; this indicates a bug.

    The offending object (a run, a sequence) is attached as ``payload``.
    """

    def __init__(self, message, payload=None):
        super().__init__(message)
        self.payload = payload


class SolverError(NodimError):
    """A projection did not converge; ``trace`` carries the diagnostics."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace
