"""Exception hierarchy for profilematch.

Every domain error raised by the library derives from ProfileMatchingError,
so CLI and embedding code can catch one type and map it to a structured
diagnostic. Programming errors (bad argument types and similar) raise the
usual built-ins instead.
"""

from __future__ import annotations


class ProfileMatchingError(Exception):
    """Base class for all domain errors raised by this package."""


class ValidationError(ProfileMatchingError):
    """An input object violates one of its documented invariants."""


class ParseError(ProfileMatchingError):
    """A text input could not be parsed. Carries a 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnknownEdgeError(ProfileMatchingError):
    """A matching references a pair that is not an edge of the instance."""


class LengthMismatchError(ProfileMatchingError):
    """Two profiles of different lengths were compared."""


class NotPerfectError(ProfileMatchingError):
    """An operation required a perfect matching but some vertex is free."""


class NotImprovingError(ProfileMatchingError):
    """The supplied pair does not improve the matching."""


class RankCountError(ProfileMatchingError):
    """A preset weight family was asked for too few rank levels."""


class RankRangeError(ProfileMatchingError):
    """An edge rank lies outside {1, ..., r}."""


class MissingDistanceError(ProfileMatchingError):
    """A distance-aware weight family was given ranks without distances."""


class WeightRangeError(ProfileMatchingError):
    """A closed-form weight family produced a non-positive weight."""


class NotReducibleError(ProfileMatchingError):
    """Weights do not satisfy the rank-reducibility sweep."""


class TooLargeError(ProfileMatchingError):
    """An exhaustive-enumeration guard was exceeded."""


class ConditionViolatedError(ProfileMatchingError):
    """User-supplied weights fail the dominance condition.

    The offending triple is attached as ``counterexample``.
    """

    def __init__(self, message: str, counterexample=None):
        super().__init__(message)
        self.counterexample = counterexample


class InfeasibleAssignmentError(ProfileMatchingError):
    """A greedy stage could not place a student although seats remain."""


class MixedInstancesError(ProfileMatchingError):
    """Reports built from different lottery instances were combined."""


class ConfigError(ProfileMatchingError):
    """A synthetic-data configuration is unusable."""
