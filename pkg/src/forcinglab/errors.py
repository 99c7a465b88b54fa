class ForcingLabError(Exception):
    """Base class for all errors raised by this package."""


class InputError(ForcingLabError):
    """Malformed or inconsistent input: unknown identifiers, bad files, invalid values."""


class SizeCapError(ForcingLabError):
    """A construction would exceed the configured condition-count cap."""
