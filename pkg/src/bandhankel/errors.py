"""Error types shared by all modules, mapped to CLI exit codes."""


class BandHankelError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(BandHankelError):
    """Invalid configuration or arguments (CLI exit code 2)."""


class BudgetError(BandHankelError):
    """An enumeration or term budget would be exceeded (CLI exit code 3)."""


class NumericalError(BandHankelError):
    """A numerical routine failed or produced an invalid result (CLI exit code 4)."""
