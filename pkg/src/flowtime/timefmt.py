"""Duration formatting helpers (hours <-> "3d 1h 42m 5s" style strings)."""

from __future__ import annotations

SECONDS_PER_HOUR = 3600.0


def hours_to_seconds(hours: float) -> float:
    return hours * SECONDS_PER_HOUR


def seconds_to_hours(seconds: float) -> float:
    return seconds / SECONDS_PER_HOUR


def format_seconds(seconds: float) -> str:
    """Render a duration as ``3d 1h 42m 5s``, rounding to whole seconds."""
    total = int(round(seconds))
    sign = "-" if total < 0 else ""
    total = abs(total)
    d, rem = divmod(total, 86400)
    h, rem = divmod(rem, 3600)
    m, s = divmod(rem, 60)
    return f"{sign}{d}d {h}h {m}m {s}s"


def format_hours(hours: float) -> str:
    return format_seconds(hours_to_seconds(hours))


def dhms_to_seconds(d: int = 0, h: int = 0, m: int = 0, s: int = 0) -> int:
    """Inverse convenience used heavily in tests against published figures."""
    return ((d * 24 + h) * 60 + m) * 60 + s
