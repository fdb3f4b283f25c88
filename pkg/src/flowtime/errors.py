"""Exception hierarchy shared across the toolkit.

Two broad families matter for the CLI exit-code mapping: ``DataError``
(bad or inconsistent input, exit 2) and ``NumericError`` (a computation
that could not be carried out, exit 3).
"""

from __future__ import annotations


class FlowtimeError(Exception):
    """Base class for all toolkit errors."""


class DataError(FlowtimeError):
    """Invalid or inconsistent input data."""


class NumericError(FlowtimeError):
    """A numeric procedure failed or was handed a malformed model."""


# --- event log ingestion ---------------------------------------------------

class MissingColumn(DataError):
    """CSV header lacks one of case/activity/timestamp."""


class BadTimestamp(DataError):
    """A row's timestamp does not parse as an instant."""

    def __init__(self, row: int, value: str):
        super().__init__(f"row {row}: unparseable timestamp {value!r}")
        self.row = row
        self.value = value


class BadRow(DataError):
    """A row is structurally invalid (e.g. empty activity or case)."""


class EmptyLog(DataError):
    """The log contains no events (or no traces where some are required)."""


# --- mixtures --------------------------------------------------------------

class WeightSumViolation(DataError):
    """Mixture part weights do not sum to one."""


class NoSamples(DataError):
    """A KDE fit was requested on an empty sample set."""


class FitFailure(NumericError):
    """The mixture optimizer did not converge for any component count."""


class DegenerateComponent(NumericError):
    """A Gaussian component has essentially no mass on the nonnegative axis."""


# --- discovery / flows -----------------------------------------------------

class InvalidOrder(DataError):
    """Discovery order k must be >= 1."""


class UnknownState(DataError):
    """A scenario edit references a state that does not exist."""


class UnknownEdge(UnknownState):
    """A scenario edit references a transition that does not exist."""


# --- analysis --------------------------------------------------------------

class SingularSystem(NumericError):
    """The stationary linear system is singular; the flow is malformed."""


class NotInterior(NumericError):
    """State elimination was asked to remove the start or end state."""


class AbsorbingSelfLoop(NumericError):
    """A self-loop with probability >= 1 cannot be closed."""


class WalkTooLong(NumericError):
    """A simulated run exceeded the step safety cap."""


# --- evaluation ------------------------------------------------------------

class EdgeMismatch(DataError):
    """Two binned distributions use different bin edges."""


class AllOutOfRange(DataError):
    """No duration falls inside the binning range."""


# --- what-if ---------------------------------------------------------------

class RowDegenerate(DataError):
    """A probability edit cannot be rebalanced (no sibling mass)."""


class ImmutableEdge(DataError):
    """The end-to-start structural transition cannot be edited."""


class IrreducibilityBroken(DataError):
    """An edit disconnected the flow (some state left every start-end path)."""
