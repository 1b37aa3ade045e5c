"""Turn binary sensor edges into occupancy and appliance-use intervals.

Per sensor, a payload of 1 opens an interval and a payload of 0 closes
it; repeated 1s while open and stray 0s while closed are ignored. All
intervals are half-open [start_ts, end_ts) in epoch milliseconds. The
truncated flag marks intervals whose end was imposed (end of stream or
overlap resolution) rather than observed as that sensor's own off edge.
"""

from __future__ import annotations

import csv
from bisect import bisect_right
from dataclasses import dataclass, replace
from pathlib import Path

from .ambient import EVENT_KINDS, AmbientEvent

DEFAULT_ROOM = "Outside"


@dataclass(frozen=True, order=True)
class Interval:
    start_ts: int
    end_ts: int
    kind: str
    location: str
    truncated: bool = False

    def __post_init__(self):
        if self.end_ts <= self.start_ts:
            raise ValueError(f"empty interval [{self.start_ts}, {self.end_ts})")
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"unknown interval kind {self.kind!r}")

    @property
    def duration_ms(self) -> int:
        return self.end_ts - self.start_ts

    def contains(self, ts: int) -> bool:
        return self.start_ts <= ts < self.end_ts


def detect_intervals(
    events,
    kinds=EVENT_KINDS,
    close_ts: int | None = None,
    timeout_ms: int | None = None,
) -> list[Interval]:
    """Run the open/close state machine for every matching sensor.

    An interval still open when events run out is closed at close_ts
    (default: the last matching event's timestamp) and flagged truncated.
    With timeout_ms set, each 1 arms a deadline that many ms ahead; the
    interval closes at the deadline if nothing arrives first, which
    counts as a regular close, not a truncation.
    """
    for kind in kinds:
        if kind not in EVENT_KINDS:
            raise ValueError(f"unknown sensor kind {kind!r}")
    if timeout_ms is not None and timeout_ms <= 0:
        raise ValueError(f"timeout_ms must be positive, got {timeout_ms}")
    relevant = sorted(ev for ev in events if ev.kind in kinds)
    if close_ts is None and relevant:
        close_ts = relevant[-1].ts

    out: list[Interval] = []
    open_start: dict[tuple, int] = {}
    deadline: dict[tuple, int] = {}

    def emit(key: tuple, end: int, truncated: bool):
        start = open_start.pop(key)
        deadline.pop(key, None)
        if end > start:
            out.append(Interval(start, end, key[0], key[1], truncated))

    for ev in relevant:
        key = (ev.kind, ev.location)
        if key in open_start and timeout_ms is not None and ev.ts > deadline[key]:
            emit(key, deadline[key], truncated=False)
        if ev.state:
            if key not in open_start:
                open_start[key] = ev.ts
            if timeout_ms is not None:
                deadline[key] = ev.ts + timeout_ms
        elif key in open_start:
            emit(key, ev.ts, truncated=False)

    for key in sorted(open_start):
        if timeout_ms is not None and deadline[key] <= close_ts:
            emit(key, deadline[key], truncated=False)
        else:
            emit(key, close_ts, truncated=True)
    out.sort()
    return out


def detect_room_intervals(events, **kwargs) -> list[Interval]:
    return detect_intervals(events, kinds=("pir",), **kwargs)


def appliance_intervals(events, **kwargs) -> list[Interval]:
    return detect_intervals(events, kinds=("relay", "force"), **kwargs)


def resolve_single_person(intervals) -> list[Interval]:
    """Collapse overlapping room intervals under a one-occupant assumption.

    Accepts a flat interval list or a room -> intervals mapping. The most
    recent motion wins: when a new interval starts inside the current
    one, the current interval is cut at the new start (flagged truncated)
    and its remainder discarded. Intervals starting at the same
    millisecond keep only the lexicographically last location.
    """
    if isinstance(intervals, dict):
        intervals = [iv for group in intervals.values() for iv in group]
    pending = sorted(intervals, key=lambda iv: (iv.start_ts, iv.location))
    out: list[Interval] = []
    current: Interval | None = None
    for iv in pending:
        if current is None or iv.start_ts >= current.end_ts:
            if current is not None:
                out.append(current)
            current = iv
        elif iv.start_ts == current.start_ts:
            current = iv
        else:
            out.append(replace(current, end_ts=iv.start_ts, truncated=True))
            current = iv
    if current is not None:
        out.append(current)
    return out


def locate(resolved, ts: int, default: str = DEFAULT_ROOM) -> str:
    """Room occupied at ts, or default when no interval covers it.

    resolved must be non-overlapping and sorted, as produced by
    resolve_single_person.
    """
    starts = [iv.start_ts for iv in resolved]
    idx = bisect_right(starts, ts) - 1
    if idx >= 0 and resolved[idx].contains(ts):
        return resolved[idx].location
    return default


def active_at(intervals, ts: int) -> set[str]:
    """Locations of intervals (possibly overlapping) covering ts."""
    return {iv.location for iv in intervals if iv.contains(ts)}


def write_intervals(path: str | Path, intervals) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["kind", "location", "start_ts", "end_ts", "truncated"])
        for iv in intervals:
            writer.writerow(
                [iv.kind, iv.location, iv.start_ts, iv.end_ts, int(iv.truncated)]
            )


def read_intervals(path: str | Path) -> list[Interval]:
    out = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(
                Interval(
                    start_ts=int(row["start_ts"]),
                    end_ts=int(row["end_ts"]),
                    kind=row["kind"],
                    location=row["location"],
                    truncated=bool(int(row["truncated"])),
                )
            )
    return out


def events_from_intervals(intervals) -> list[AmbientEvent]:
    """Reconstruct the edge stream that would produce these intervals."""
    events = []
    for iv in intervals:
        events.append(AmbientEvent(iv.start_ts, iv.kind, iv.location, True))
        if not iv.truncated:
            events.append(AmbientEvent(iv.end_ts, iv.kind, iv.location, False))
    events.sort()
    return events
