"""CSV event-log ingestion and the per-case trace representation.

A log is a flat list of (activity, case, timestamp) events; the trace
representation groups events by case and orders them by timestamp, with
stable input order as the tiebreak so parsing is a pure function of the
byte stream.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from datetime import datetime
from typing import IO, Iterable

from .errors import BadRow, BadTimestamp, EmptyLog, MissingColumn

REQUIRED_COLUMNS = ("case", "activity", "timestamp")


@dataclass(frozen=True)
class Event:
    id: int
    activity: str
    case_id: str
    timestamp: datetime


@dataclass
class Trace:
    case_id: str
    events: list[Event]

    @property
    def activity_trace(self) -> list[str]:
        return [e.activity for e in self.events]

    @property
    def time_trace(self) -> list[datetime]:
        return [e.timestamp for e in self.events]

    def duration_seconds(self) -> float:
        return (self.events[-1].timestamp - self.events[0].timestamp).total_seconds()

    def __len__(self) -> int:
        return len(self.events)


@dataclass
class EventLog:
    events: list[Event]
    traces: list[Trace] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.events)


def _parse_timestamp(raw: str, row: int) -> datetime:
    text = raw.strip()
    try:
        ts = datetime.fromisoformat(text)
    except ValueError:
        raise BadTimestamp(row, raw) from None
    # Naive local-time semantics: a stray offset is dropped, not converted.
    if ts.tzinfo is not None:
        ts = ts.replace(tzinfo=None)
    return ts


def parse_event_log(source: IO[str] | Iterable[str] | str) -> EventLog:
    """Parse a CSV stream with header ``case,activity,timestamp``.

    Accepts an open text stream, an iterable of lines, or the CSV text
    itself. Traces are built eagerly; ``build_traces`` is idempotent.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    reader = csv.DictReader(source)
    if reader.fieldnames is None:
        raise EmptyLog("no header row")
    header = [name.strip() for name in reader.fieldnames]
    missing = [col for col in REQUIRED_COLUMNS if col not in header]
    if missing:
        raise MissingColumn(f"header lacks column(s): {', '.join(missing)}")

    events: list[Event] = []
    for i, row in enumerate(reader):
        # DictReader keys follow the raw header; normalize spacing once.
        record = {k.strip(): (v or "") for k, v in row.items() if k is not None}
        case_id = record["case"].strip()
        activity = record["activity"].strip()
        if not case_id:
            raise BadRow(f"row {i + 2}: empty case id")
        if not activity:
            raise BadRow(f"row {i + 2}: empty activity name")
        ts = _parse_timestamp(record["timestamp"], i + 2)
        events.append(Event(id=i, activity=activity, case_id=case_id, timestamp=ts))

    if not events:
        raise EmptyLog("no data rows")
    return build_traces(EventLog(events=events))


def load_event_log(path: str) -> EventLog:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return parse_event_log(fh)


def build_traces(log: EventLog) -> EventLog:
    """Group events by case and sort by (timestamp, input order)."""
    by_case: dict[str, list[Event]] = {}
    for event in log.events:
        by_case.setdefault(event.case_id, []).append(event)
    traces = []
    for case_id, case_events in by_case.items():
        ordered = sorted(case_events, key=lambda e: e.timestamp)  # stable sort
        traces.append(Trace(case_id=case_id, events=ordered))
    log.traces = traces
    return log


def log_mean_duration(log: EventLog) -> float:
    """Mean whole-trace duration in seconds."""
    if not log.traces:
        raise EmptyLog("no traces")
    return sum(t.duration_seconds() for t in log.traces) / len(log.traces)


def trace_durations(log: EventLog, unit: str = "seconds") -> list[float]:
    """Per-trace (last - first) durations, in seconds or nearest whole hours."""
    if unit not in ("seconds", "hours-rounded"):
        raise ValueError(f"unknown unit {unit!r}")
    durations = [t.duration_seconds() for t in log.traces]
    if unit == "hours-rounded":
        return [float(round(d / 3600.0)) for d in durations]
    return durations
