"""Exception types raised across the package.

Every error derives from :class:`OvermeasureError`, itself a ``ValueError``,
so callers can catch the whole family at once.
"""

from __future__ import annotations


class OvermeasureError(ValueError):
    pass


class NotSquare(OvermeasureError):
    pass


class NotHermitian(OvermeasureError):
    pass


class ClusterAmbiguity(OvermeasureError):
    """Two eigenvalues are too far apart to merge but too close to separate."""


class ShapeMismatch(OvermeasureError):
    pass


class DimMismatch(OvermeasureError):
    pass


class NotAProjector(OvermeasureError):
    pass


class NotCommuting(OvermeasureError):
    pass


class NotOrthogonal(OvermeasureError):
    pass


class PreconditionViolated(OvermeasureError):
    pass


class NonFiniteImage(OvermeasureError):
    pass


class DuplicateCoarseValues(OvermeasureError):
    pass


class CountMismatch(OvermeasureError):
    pass


class TooManyTerms(OvermeasureError):
    pass


class NotCompatible(OvermeasureError):
    pass


class EmptyList(OvermeasureError):
    pass


class NotUnit(OvermeasureError):
    pass


class IndexOutOfRange(OvermeasureError):
    pass


class ZeroProbabilityBranch(OvermeasureError):
    pass


class InvalidSpectralForm(OvermeasureError):
    pass


class ParseError(OvermeasureError):
    """Malformed observable or state file; ``line``/``column`` are 1-based."""

    def __init__(self, message: str, source: str = "<input>", line: int | None = None,
                 column: int | None = None):
        self.source = source
        self.line = line
        self.column = column
        self.reason = message
        where = source if line is None else f"{source}:{line}:{column}"
        super().__init__(f"{where}: {message}")
