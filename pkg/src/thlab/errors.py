"""Error taxonomy and process exit codes shared by the CLI and the service.

Exit codes: 0 success, 2 validation mismatch, 3 resource limit, 4 bad
arguments.  HTTP mappings live in ``service.py``.
"""

EXIT_OK = 0
EXIT_MISMATCH = 2
EXIT_RESOURCE_LIMIT = 3
EXIT_BAD_ARGS = 4


class ThlabError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgumentError(ThlabError, ValueError):
    """An argument lies outside the documented domain of an operation."""


class MissingSupportError(ThlabError, LookupError):
    """An entry sequence does not cover the index range an operation needs."""


class ResourceLimitError(ThlabError, RuntimeError):
    """An enumeration or sampling budget would be exceeded."""


class UnsupportedTheoryError(ThlabError, ValueError):
    """A theoretical quantity was requested outside its proven scope.

    The closed-form limit moments assume unit moving-average weights;
    asking for them with non-unit weights raises this error instead of
    silently returning a wrong number.
    """


class NumericInputError(ThlabError, ValueError):
    """Numeric input is non-finite or otherwise unusable."""
