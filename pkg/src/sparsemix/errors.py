"""Exception hierarchy shared across the package."""


class SparsemixError(Exception):
    """Base class for all package errors."""


class InputError(SparsemixError):
    """Bad runtime input (non-finite values, out-of-range arguments)."""


class ConfigError(SparsemixError):
    """Inconsistent or invalid configuration values."""


class ValidationError(SparsemixError):
    """Dataset failed validation."""


class ParseError(SparsemixError):
    """Malformed input file."""


class GenerationError(SparsemixError):
    """Synthetic dataset construction could not be completed."""


class DivergenceError(SparsemixError):
    """Optimization diverged."""
