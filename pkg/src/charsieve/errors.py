"""Exception types shared across the package.

Every error raised deliberately by this package derives from
:class:`CharsieveError`, so callers can catch one type at the CLI boundary.
Errors that are also input-validation failures additionally derive from
``ValueError`` to keep behaviour unsurprising in library use.
"""

from __future__ import annotations


class CharsieveError(Exception):
    """Base class for all deliberate errors raised by charsieve."""


class DomainError(CharsieveError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PoleError(DomainError):
    """Evaluation was requested at (or numerically on top of) a pole."""


class PrecisionError(CharsieveError):
    """A certified error bound could not be pushed below the target tolerance."""


class ContourError(CharsieveError):
    """No admissible contour was found (zeros persist on every nudged boundary)."""


class ContractError(CharsieveError):
    """A stated hypothesis of a bound was violated while strict mode was active."""


class ConfigError(CharsieveError, ValueError):
    """A run configuration file or value was rejected."""


class IngestionError(CharsieveError, ValueError):
    """An external data table could not be parsed or failed validation."""
