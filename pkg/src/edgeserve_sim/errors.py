"""Exception hierarchy shared by every module."""


class SimError(Exception):
    """Base class for all simulator errors."""


class IoError(SimError, OSError):
    """A file could not be read or written."""


class SchemaError(SimError):
    """A document is missing a field or has an ill-typed one.

    ``path`` is the dotted JSON path of the fault, e.g. ``models[2].tasks[0].task_id``.
    """

    def __init__(self, message, path=""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class InvariantError(SchemaError):
    """A well-typed value violates a domain invariant."""


class ConfigError(SchemaError):
    """An experiment or workload configuration is invalid."""


class CalibrationError(SimError):
    """The accuracy curve cannot be fitted to the published scores."""


class FormatError(SimError):
    """A trace file is malformed (line number and column attached)."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column!r}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


class ValidationError(FormatError):
    """A well-formed trace fails semantic checks."""


class TimeError(SimError):
    """Simulation time moved backwards."""


class CacheError(SimError):
    """Base class for edge-cache state machine errors."""


class ModelTooLarge(CacheError):
    pass


class NotCached(CacheError):
    pass


class AlreadyCached(CacheError):
    pass


class InsufficientMemory(CacheError):
    pass


class Infeasible(CacheError):
    """Cached models cannot free enough memory for the incoming one."""
