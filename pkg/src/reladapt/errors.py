"""Shared exception types.

Every error that crosses a module boundary is one of these, so callers can
catch by contract instead of by implementation detail.
"""
from __future__ import annotations


class ReladaptError(Exception):
    """Base class for all package errors."""


class ParseError(ReladaptError):
    """Raised on the first grammar violation while lexing or parsing.

    `index` is the offending token's position in the token stream (equal to
    the stream length when the input ended too early), `line`/`col` are
    1-based source coordinates, and `expected` lists the token kinds that
    would have been accepted.
    """

    def __init__(self, message: str, *, line: int, col: int,
                 expected: tuple[str, ...] = (), found: str = "",
                 index: int = 0) -> None:
        super().__init__(message)
        self.line = line
        self.col = col
        self.expected = expected
        self.found = found
        self.index = index


class InapplicableTransform(ReladaptError):
    """A transform was applied at a site where its predicate does not hold."""


class DegenerateInput(ReladaptError):
    """Input lacks the structure a metric or statistic needs (e.g. K < 2)."""


class DegenerateGeometry(ReladaptError):
    """Prototype geometry collapsed (zero scale), distances are undefined."""


class DimensionMismatch(ReladaptError):
    """Vector length does not match what the consumer was fitted with."""


class MissingCapability(ReladaptError):
    """Adapter does not support the requested operation."""


class MissingMetric(ReladaptError):
    """A weighted metric is absent from the supplied metric values."""


class UnknownToken(ReladaptError):
    """Prompt token outside the generator's vocabulary."""


class NoViableToken(ReladaptError):
    """Constrained decoding found no token that keeps the prefix viable."""


class NoApplicableTransforms(ReladaptError):
    """Search could not produce a single mutated candidate."""


class ConfigError(ReladaptError):
    """Invalid or unknown configuration key, section, or value."""


class ManifestError(ReladaptError):
    """Malformed dataset manifest row or header."""


class AdapterError(ReladaptError):
    """Remote adapter returned an error envelope.

    `code` is the stable wire-protocol error code.
    """

    def __init__(self, message: str, *, code: str = "internal") -> None:
        super().__init__(message)
        self.code = code


class AdapterUnavailable(ReladaptError):
    """An adapter could not be constructed or reached."""


class ObjectiveFailure(ReladaptError):
    """Objective function failed during latent ascent."""
