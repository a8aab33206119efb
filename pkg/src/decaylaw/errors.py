"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class DecayLawError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class InvalidInput(DecayLawError, ValueError):
    exit_code = 2


class GuardRejected(DecayLawError, ValueError):
    """Alpha collides with a ratio v/e reachable inside the configured caps."""

    exit_code = 3


class CapExceeded(DecayLawError):
    """A pattern or search exceeded a configured size cap."""

    exit_code = 4


class PreconditionError(DecayLawError, ValueError):
    exit_code = 2
