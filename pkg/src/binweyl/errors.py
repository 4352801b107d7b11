"""Exception hierarchy; the CLI maps each class to an exit code."""


class WeylError(Exception):
    exit_code = 4


class UsageError(WeylError, ValueError):
    """Bad arguments: wrong widths, lengths, ranges."""

    exit_code = 2


class ResourceError(WeylError):
    """Request exceeds a configured size limit (e.g. dense materialization)."""

    exit_code = 2


class ParseError(WeylError, ValueError):
    exit_code = 3

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class IntegrityError(WeylError):
    """A structural invariant does not hold (e.g. a non-bijective index map)."""

    exit_code = 4
