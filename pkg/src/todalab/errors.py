"""Exceptions shared across the package.

Validation problems (bad parameters, inconsistent configuration) and
numerical failures (overflow, loss of accuracy, boundary contamination)
are kept apart so the command line tool can map them to distinct exit
codes.
"""


class TodaLabError(Exception):
    """Base class for everything raised deliberately by this package."""


class ValidationError(TodaLabError):
    """Input or configuration rejected before any computation ran."""


class NumericalError(TodaLabError):
    """A computation ran but its result cannot be trusted."""


class BoundaryContamination(NumericalError):
    """Lattice evolution reached the edge of the finite window."""


class RecurrenceOverflow(NumericalError):
    """Transfer-matrix style recurrence exceeded floating point range."""


class RootBracketError(NumericalError):
    """A required root could not be bracketed or refined."""


class DegenerateSurface(ValidationError):
    """Branch points too close; callers must use genus-0 limit formulas."""
