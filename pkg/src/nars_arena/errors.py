"""Exception hierarchy shared by every subsystem."""


class ArenaError(Exception):
    """Base class for all errors raised by nars_arena."""


class ContractViolation(ArenaError, ValueError):
    """An argument is outside the domain an operation accepts."""


class UsageError(ArenaError, RuntimeError):
    """An object was used in a state that does not allow the call."""


class UnsupportedEnvironment(ArenaError, ValueError):
    pass


class EncodingError(ArenaError, ValueError):
    pass


class UnknownOpError(ArenaError, LookupError):
    pass


class NoEvidenceError(ArenaError, ValueError):
    pass


class OracleError(ArenaError, RuntimeError):
    pass


class ConfigError(ArenaError, ValueError):
    pass


class SpawnError(ArenaError, OSError):
    pass


class BrokenSessionError(ArenaError, RuntimeError):
    pass
