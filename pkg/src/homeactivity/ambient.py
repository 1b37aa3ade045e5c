"""Ambient binary-sensor events: per-room PIR, appliance relays, force pads.

Events arrive as newline-delimited JSON, one object per line:

    {"ts": 1696154700000, "topic": "home/pir/bedroom", "payload": "1"}

Topics follow home/<kind>/<location> where kind is one of pir, relay or
force. PIR locations must name a known room; relay and force locations
must name a known appliance. Location matching is case-insensitive and
normalizes to the canonical spelling.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

ROOMS = ("Bedroom", "Kitchen", "Hall", "Worship", "Stairs", "Bathroom", "Outside")
APPLIANCES = ("tv", "mirror_bulb", "bathroom_switch", "water_bottle")
EVENT_KINDS = ("pir", "relay", "force")
TOPIC_PREFIX = "home"

_CANONICAL = {name.lower(): name for name in ROOMS + APPLIANCES}


class EventParseError(ValueError):
    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


@dataclass(frozen=True, order=True)
class AmbientEvent:
    """One binary sensor edge; state True means active/on/pressed."""

    ts: int
    kind: str
    location: str
    state: bool

    @property
    def topic(self) -> str:
        return f"{TOPIC_PREFIX}/{self.kind}/{self.location}"


def canonical_location(kind: str, location: str) -> str:
    """Resolve a topic location segment to its canonical name, or raise."""
    name = _CANONICAL.get(location.lower())
    if kind == "pir":
        if name not in ROOMS:
            raise EventParseError(f"unknown room {location!r}")
    else:
        if name not in APPLIANCES:
            raise EventParseError(f"unknown appliance {location!r}")
    return name


def parse_event(obj: dict, lineno: int | None = None) -> AmbientEvent:
    for key in ("ts", "topic", "payload"):
        if key not in obj:
            raise EventParseError(f"missing field {key!r}", lineno)
    if not isinstance(obj["ts"], int) or isinstance(obj["ts"], bool):
        raise EventParseError(f"ts must be an integer, got {obj['ts']!r}", lineno)
    parts = str(obj["topic"]).split("/")
    if len(parts) != 3 or parts[0] != TOPIC_PREFIX:
        raise EventParseError(f"malformed topic {obj['topic']!r}", lineno)
    _, kind, location = parts
    if kind not in EVENT_KINDS:
        raise EventParseError(f"unknown sensor kind {kind!r}", lineno)
    try:
        location = canonical_location(kind, location)
    except EventParseError as exc:
        raise EventParseError(str(exc), lineno) from None
    if obj["payload"] not in ("0", "1"):
        raise EventParseError(f"invalid payload {obj['payload']!r}", lineno)
    return AmbientEvent(
        ts=obj["ts"], kind=kind, location=location, state=obj["payload"] == "1"
    )


def parse_event_line(line: str, lineno: int | None = None) -> AmbientEvent:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise EventParseError(f"invalid JSON: {exc.msg}", lineno) from None
    if not isinstance(obj, dict):
        raise EventParseError("event line must be a JSON object", lineno)
    return parse_event(obj, lineno)


def load_events(path: str | Path) -> list[AmbientEvent]:
    events = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                events.append(parse_event_line(line, lineno))
            except EventParseError as exc:
                raise EventParseError(f"{path}: {exc}") from None
    return events


def write_events(path: str | Path, events, append: bool = False) -> None:
    mode = "a" if append else "w"
    with open(path, mode, encoding="utf-8") as fh:
        for ev in events:
            doc = {"ts": ev.ts, "topic": ev.topic, "payload": "1" if ev.state else "0"}
            fh.write(json.dumps(doc, sort_keys=True) + "\n")


def shift_events(events, offset_ms: int) -> list[AmbientEvent]:
    """Apply a constant clock offset to one source before merging."""
    return [
        AmbientEvent(ev.ts + offset_ms, ev.kind, ev.location, ev.state)
        for ev in events
    ]


def merge_streams(streams) -> list[AmbientEvent]:
    """Merge per-source event lists into one timeline.

    Each input stream must already be non-decreasing in time; the merge
    orders by (ts, kind, location) so simultaneous events from different
    sources land in a stable, reproducible order.
    """
    streams = list(streams)
    for idx, stream in enumerate(streams):
        for pos, (prev, cur) in enumerate(zip(stream, stream[1:]), start=1):
            if cur.ts < prev.ts:
                raise EventParseError(
                    f"stream {idx} is out of order at index {pos}: "
                    f"ts {cur.ts} after {prev.ts}"
                )
    merged = [ev for stream in streams for ev in stream]
    merged.sort()
    return merged
