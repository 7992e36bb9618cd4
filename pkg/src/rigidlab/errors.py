"""Exception hierarchy shared across the package.

Every error raised on purpose derives from RigidlabError so callers can
catch the whole family with one clause.  Budget failures carry the best
partial result found so far, because an exhausted search is still data.
"""

from __future__ import annotations


class RigidlabError(Exception):
    """Base class for all deliberate failures."""


class NotRepresentable(RigidlabError):
    """A requested value does not live in the exact coefficient field."""


class NegativeRadicand(RigidlabError):
    """Square root of a negative quantity was requested."""


class MixedBackend(RigidlabError):
    """Exact and floating values were combined in one operation."""


class ConcentricCircles(RigidlabError):
    """Circle intersection is degenerate: shared center."""


class MissingTriangle(RigidlabError):
    """A point set lacks one of the three base triangle points."""


class NotAnchored(RigidlabError):
    """No placement order exists: some vertex never sees two placed anchors."""


class BudgetExhausted(RigidlabError):
    """A bounded search ran out of budget before reaching a verdict.

    ``partial`` holds whatever best intermediate result was available
    at the moment the budget ran out (may be None).
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class NoWitnessExists(RigidlabError):
    """Even the full available universe fails to separate the two points."""


class InconsistentDistances(RigidlabError):
    """Trilateration constraints admit no common solution point."""


class DuplicateMember(RigidlabError):
    """A family of relations contains the same member twice."""


class EmptyFamily(RigidlabError):
    """A product construction needs at least one member relation."""


class UsageError(RigidlabError):
    """Bad command-line arguments or malformed input files."""
