"""RFC 3339 timestamp helpers (Python 3.10's fromisoformat lacks 'Z')."""

from __future__ import annotations

from datetime import datetime, timezone

from .errors import DomainError


def parse_rfc3339(value: str) -> datetime:
    """Parse an RFC 3339 timestamp to an aware datetime."""
    if not isinstance(value, str) or not value:
        raise DomainError(f"timestamp must be a non-empty string, got {value!r}")
    text = value[:-1] + "+00:00" if value.endswith(("Z", "z")) else value
    try:
        parsed = datetime.fromisoformat(text)
    except ValueError as exc:
        raise DomainError(f"invalid RFC 3339 timestamp {value!r}") from exc
    if parsed.tzinfo is None:
        raise DomainError(f"timestamp {value!r} must carry a UTC offset")
    return parsed


def format_rfc3339(moment: datetime) -> str:
    if moment.tzinfo is None:
        raise DomainError("timestamp must be timezone-aware")
    return moment.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def now_rfc3339() -> str:
    return format_rfc3339(datetime.now(timezone.utc).replace(microsecond=0))
