"""UTC timestamp formatting shared by the event log and the CSV export:
ISO-8601, millisecond precision, trailing Z."""

from __future__ import annotations

from datetime import datetime, timezone


def format_utc_ms(dt: datetime) -> str:
    dt = dt.astimezone(timezone.utc)
    return dt.strftime("%Y-%m-%dT%H:%M:%S.") + f"{dt.microsecond // 1000:03d}Z"


def parse_utc_ms(text: str) -> datetime:
    return datetime.strptime(text, "%Y-%m-%dT%H:%M:%S.%fZ").replace(tzinfo=timezone.utc)


def utcnow() -> datetime:
    """Current time truncated to whole milliseconds, so a timestamp survives
    the round-trip through its serialized form unchanged."""
    now = datetime.now(timezone.utc)
    return now.replace(microsecond=(now.microsecond // 1000) * 1000)
