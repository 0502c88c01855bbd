"""Exception types shared across the package."""


class QpgError(Exception):
    """Base class for errors raised by this package."""


class InvalidInputError(QpgError):
    """Malformed input data: bad file contents, wrong shapes, broken invariants."""


class CapExceededError(QpgError):
    """A configured resource cap (group size, moment-tensor size) was exceeded."""


class GroupTooLargeError(CapExceededError):
    """Group closure exceeded the configured element cap."""


class CheckFailedError(QpgError):
    """An asserted numerical check did not hold at its tolerance."""
