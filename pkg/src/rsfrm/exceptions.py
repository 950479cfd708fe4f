"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class RSFRMError(Exception):
    """Base class for every error raised by :mod:`rsfrm`."""


class DimensionMismatch(RSFRMError, ValueError):
    pass


class LengthMismatch(RSFRMError, ValueError):
    pass


class NotPositiveDefinite(RSFRMError, ArithmeticError):
    """Cholesky factorization met a non-positive pivot."""


class InsufficientData(RSFRMError, ValueError):
    pass


class EmptyCluster(RSFRMError, ArithmeticError):
    """One or more clusters carry zero total membership weight.

    ``clusters`` lists the offending cluster indices.
    """

    def __init__(self, clusters):
        self.clusters = list(clusters)
        super().__init__(f"clusters with zero membership weight: {self.clusters}")


class IndexOutOfRange(RSFRMError, IndexError):
    pass


class DegenerateLSSC(RSFRMError, ArithmeticError):
    """All non-constant coefficients are zero, so their log-sum is undefined."""


class DegenerateStatistic(RSFRMError, ArithmeticError):
    pass


class TooFewPatterns(RSFRMError, ValueError):
    pass


class ParseError(RSFRMError, ValueError):
    """Malformed KEEL input. ``line`` is 1-based, or ``None`` if not line-specific."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)


class NonNumericAttribute(ParseError):
    pass


class LabelMismatch(RSFRMError, ValueError):
    pass


class ConfigError(RSFRMError, ValueError):
    pass
