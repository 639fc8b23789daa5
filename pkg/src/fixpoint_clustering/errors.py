"""Exception types shared across the package."""


class ClusteringError(Exception):
    """Base class for every package-specific error."""


class DimensionMismatchError(ClusteringError, ValueError):
    """A point, dataset, or parameter block has the wrong dimensionality."""


class ParseError(ClusteringError, ValueError):
    """Malformed input file. Carries row/column context where known (1-based)."""

    def __init__(self, message: str, row: int | None = None, column: int | None = None):
        where = ""
        if row is not None:
            where = f" (row {row}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + where)
        self.row = row
        self.column = column


class EmptyInputError(ParseError):
    """Input file contains no data rows."""


class TraceSchemaError(ClusteringError, ValueError):
    """A trace file declares an unknown schema version or is structurally invalid."""


class ScheduleExhausted(ClusteringError):
    """The threshold schedule cannot advance without violating its bound.

    This is a control signal, not a failure: the driver treats it as a
    stopping condition.
    """


class DisjointIntervals(ClusteringError):
    """Consecutive critical intervals do not intersect.

    Signals that the component's region jumped; the driver settles the
    component instead of building a map.
    """


class NotAContraction(ClusteringError, ValueError):
    """Requested map has ratio K >= 1 and therefore is not a contraction."""


class BanachNonConvergence(ClusteringError, RuntimeError):
    """Fixed-point iteration failed to reach tolerance within max_iter."""


class DegenerateModel(ClusteringError, RuntimeError):
    """Every mixture component was dropped; no model remains.

    The partial trace accumulated before the failure is attached as
    ``trace`` so callers can still persist it.
    """

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace
