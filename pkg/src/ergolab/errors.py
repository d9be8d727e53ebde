"""Exception types shared across the package.

The CLI maps these onto distinct exit codes, so the split between a bad
parameter and a refused resource request matters.
"""


class ErgolabError(Exception):
    """Base class for package errors."""


class ParameterError(ErgolabError, ValueError):
    """An argument is malformed or out of its documented domain."""


class ResourceLimitError(ErgolabError, RuntimeError):
    """A request exceeds a documented desk-scale resource bound."""
