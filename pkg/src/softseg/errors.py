class SoftsegError(Exception):
    """Base class for all softseg errors."""


class DataError(SoftsegError):
    """Malformed input or data that violates a documented contract."""


class InternalError(SoftsegError):
    """An internal consistency check failed; indicates a bug, not bad data."""
