"""Scripted synthetic household: inertial streams, ambient events, truth.

Motion generators are deliberately crude but well separated in feature
space; they exist to give every pipeline stage a ground-truth oracle,
not to imitate human biomechanics. All randomness flows from the
NoiseSpec seed, so identical inputs reproduce identical bytes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import signal as _sig

from .ambient import APPLIANCES, ROOMS, AmbientEvent
from .features import extract_features, layout_for
from .fusion import (
    BASIC_ACTIVITIES,
    DEFAULT_TICK_MS,
    FusionRuleTable,
    derive_sleep,
)
from .neural import CentroidModel
from .timeseries import (
    DEFAULT_OVERLAP,
    DEFAULT_PERIOD_MS,
    DEFAULT_WINDOW_LEN,
    FilterSpec,
    SampleSeries,
    butterworth_lowpass,
    interpolate_gaps,
    segment,
)

# Sleep is derived from sustained lying, never scripted or classified.
CLASSIFIER_CLASSES = ("Jog", "Lie", "Sit", "Stand", "StairDown", "StairUp", "Walk")

GRAVITY = 9.81
MS_PER_DAY = 86_400_000


class ScriptError(ValueError):
    """Raised for malformed schedule scripts."""


@dataclass(frozen=True)
class NoiseSpec:
    """Per-axis Gaussian noise plus uniform sample dropout."""

    gaussian_sigma: tuple[float, float, float] = (0.0, 0.0, 0.0)
    dropout_prob: float = 0.0
    seed: int = 0

    def __post_init__(self):
        sigma = self.gaussian_sigma
        if np.isscalar(sigma):
            sigma = (float(sigma),) * 3
        sigma = tuple(float(s) for s in sigma)
        object.__setattr__(self, "gaussian_sigma", sigma)
        if len(sigma) != 3 or any(s < 0 for s in sigma):
            raise ValueError(f"invalid gaussian_sigma {sigma}")
        if not (0 <= self.dropout_prob < 1):
            raise ValueError(f"dropout_prob must lie in [0, 1), got {self.dropout_prob}")


QUIET = NoiseSpec()


@dataclass(frozen=True)
class ScheduleEntry:
    """One scripted block: clock offset from midnight, activity, context."""

    clock_start_ms: int
    duration_ms: int
    room: str
    basic: str
    appliances: frozenset[str] = frozenset()

    def __post_init__(self):
        if not (0 <= self.clock_start_ms < MS_PER_DAY):
            raise ScriptError(f"clock_start {self.clock_start_ms} outside one day")
        if self.duration_ms <= 0:
            raise ScriptError(f"duration must be positive, got {self.duration_ms}")
        if self.room not in ROOMS:
            raise ScriptError(f"unknown room {self.room!r}")
        if self.basic not in CLASSIFIER_CLASSES:
            if self.basic == "Sleep":
                raise ScriptError("Sleep is derived from Lie; script Lie instead")
            raise ScriptError(f"unknown basic activity {self.basic!r}")
        for name in self.appliances:
            if name not in APPLIANCES:
                raise ScriptError(f"unknown appliance {name!r}")

    @property
    def clock_end_ms(self) -> int:
        return self.clock_start_ms + self.duration_ms


def _validate_script(script) -> list[ScheduleEntry]:
    entries = list(script)
    if not entries:
        raise ScriptError("script has no entries")
    for a, b in zip(entries, entries[1:]):
        if b.clock_start_ms < a.clock_end_ms:
            raise ScriptError(
                f"entries overlap at clock offset {b.clock_start_ms} ms"
            )
    return entries


def _parse_clock_ms(text: str) -> int:
    parts = text.strip().split(":")
    if len(parts) not in (2, 3) or not all(p.isdigit() for p in parts):
        raise ScriptError(f"bad clock time {text!r}")
    h, m = int(parts[0]), int(parts[1])
    s = int(parts[2]) if len(parts) == 3 else 0
    if h > 23 or m > 59 or s > 59:
        raise ScriptError(f"bad clock time {text!r}")
    return ((h * 60 + m) * 60 + s) * 1000


def load_script(path: str | Path) -> list[ScheduleEntry]:
    entries = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        want = ["clock_start", "duration_s", "room", "basic", "appliances"]
        if reader.fieldnames != want:
            raise ScriptError(f"unexpected header {reader.fieldnames}, want {want}")
        for row in reader:
            appliances = frozenset(
                a.strip() for a in row["appliances"].split("|") if a.strip()
            )
            entries.append(
                ScheduleEntry(
                    clock_start_ms=_parse_clock_ms(row["clock_start"]),
                    duration_ms=int(row["duration_s"]) * 1000,
                    room=row["room"].strip(),
                    basic=row["basic"].strip(),
                    appliances=appliances,
                )
            )
    return _validate_script(entries)


def write_script(path: str | Path, script) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["clock_start", "duration_s", "room", "basic", "appliances"])
        for e in script:
            total_s = e.clock_start_ms // 1000
            clock = f"{total_s // 3600:02d}:{total_s % 3600 // 60:02d}:{total_s % 60:02d}"
            writer.writerow(
                [clock, e.duration_ms // 1000, e.room, e.basic, "|".join(sorted(e.appliances))]
            )


def _motion_signal(basic: str, t: np.ndarray) -> np.ndarray:
    """Noise-free (n, 3) acceleration for one activity; t in seconds."""
    n = t.size
    if basic == "Stand":
        return np.tile([0.0, GRAVITY, 0.5], (n, 1))
    if basic == "Sit":
        return np.tile([0.0, 6.9, 6.9], (n, 1))
    if basic == "Lie":
        return np.tile([GRAVITY, 0.3, 0.3], (n, 1))
    if basic in ("Walk", "Jog", "StairUp", "StairDown"):
        if basic == "Jog":
            y_amp, y_hz, x_amp, x_hz = 6.0, 3.0, 1.2, 1.5
        else:
            y_amp, y_hz, x_amp, x_hz = 3.0, 2.0, 0.8, 1.0
        x = x_amp * np.sin(2 * np.pi * x_hz * t)
        y = GRAVITY + y_amp * np.sin(2 * np.pi * y_hz * t)
        z = np.full(n, 0.5)
        # Ramp period (1.6 s) divides the window hop so every window sees
        # the same phase and the per-window peak count never collapses.
        if basic == "StairUp":
            z = z + 1.5 + _sig.sawtooth(2 * np.pi * 0.625 * t)
        elif basic == "StairDown":
            z = z - 1.5 + _sig.sawtooth(2 * np.pi * 0.625 * t)
        return np.column_stack([x, y, z])
    raise ValueError(f"no motion generator for {basic!r}")


def synth_motion(
    basic: str,
    duration_ms: int,
    period_ms: int = DEFAULT_PERIOD_MS,
    noise: NoiseSpec = QUIET,
    start_ts: int = 0,
    subject_id: str = "sim",
    rng: np.random.Generator | None = None,
) -> SampleSeries:
    """Synthesize one activity block; dropout may delete samples."""
    if duration_ms < DEFAULT_WINDOW_LEN * period_ms:
        raise ValueError(
            f"duration {duration_ms} ms is shorter than one window "
            f"({DEFAULT_WINDOW_LEN * period_ms} ms)"
        )
    if rng is None:
        rng = np.random.default_rng(noise.seed)
    n = duration_ms // period_ms
    ts = start_ts + period_ms * np.arange(n, dtype=np.int64)
    t = (ts - start_ts) / 1000.0
    xyz = _motion_signal(basic, t)
    sigma = np.asarray(noise.gaussian_sigma)
    if sigma.any():
        xyz = xyz + rng.normal(0.0, 1.0, size=xyz.shape) * sigma
    if noise.dropout_prob > 0:
        keep = rng.random(n) >= noise.dropout_prob
        keep[0] = True  # anchor the grid
        ts, xyz = ts[keep], xyz[keep]
    return SampleSeries(subject_id=subject_id, period_ms=period_ms, ts=ts, xyz=xyz)


@dataclass(frozen=True, eq=False)
class DayData:
    """Everything one simulated day produces, plus its ground truth."""

    series: SampleSeries
    events: list[AmbientEvent]
    basic_ticks: list[tuple[int, str]]
    derived_ticks: list[tuple[int, object]]


def generate_day(
    script,
    noise: NoiseSpec,
    rules: FusionRuleTable,
    day_start_ms: int = 0,
    tick_ms: int = DEFAULT_TICK_MS,
    subject_id: str = "sim",
) -> DayData:
    """Run one scripted day.

    day_start_ms is the epoch timestamp of local midnight; entry clock
    offsets are added to it. PIR edges fire on room changes (the first
    entry opens, the last closes), appliance edges on active-set changes,
    and the ground-truth timeline is fused per tick with the sleep rule
    applied to sustained lying.
    """
    entries = _validate_script(script)
    rng = np.random.default_rng([noise.seed, day_start_ms % (2**31)])

    pieces = []
    events: list[AmbientEvent] = []
    basic_ticks: list[tuple[int, str]] = []
    tick_context: list[tuple[str, frozenset]] = []

    prev_room: str | None = None
    prev_appliances: frozenset = frozenset()
    prev_end: int | None = None
    for entry in entries:
        start = day_start_ms + entry.clock_start_ms
        end = day_start_ms + entry.clock_end_ms
        if prev_end is not None and start > prev_end:
            # Script gap: close out the previous context entirely.
            events.append(AmbientEvent(prev_end, "pir", prev_room, False))
            for name in sorted(prev_appliances):
                kind = "force" if name == "water_bottle" else "relay"
                events.append(AmbientEvent(prev_end, kind, name, False))
            prev_room, prev_appliances = None, frozenset()
        if entry.room != prev_room:
            if prev_room is not None:
                events.append(AmbientEvent(start, "pir", prev_room, False))
            events.append(AmbientEvent(start, "pir", entry.room, True))
        for name in sorted(prev_appliances - entry.appliances):
            kind = "force" if name == "water_bottle" else "relay"
            events.append(AmbientEvent(start, kind, name, False))
        for name in sorted(entry.appliances - prev_appliances):
            kind = "force" if name == "water_bottle" else "relay"
            events.append(AmbientEvent(start, kind, name, True))

        pieces.append(
            synth_motion(
                entry.basic,
                entry.duration_ms,
                noise=noise,
                start_ts=start,
                subject_id=subject_id,
                rng=rng,
            )
        )
        for ts in range(start, end, tick_ms):
            basic_ticks.append((ts, entry.basic))
            tick_context.append((entry.room, entry.appliances))
        prev_room, prev_appliances, prev_end = entry.room, entry.appliances, end

    events.append(AmbientEvent(prev_end, "pir", prev_room, False))
    for name in sorted(prev_appliances):
        kind = "force" if name == "water_bottle" else "relay"
        events.append(AmbientEvent(prev_end, kind, name, False))
    events.sort()

    series = SampleSeries(
        subject_id=subject_id,
        period_ms=pieces[0].period_ms,
        ts=np.concatenate([p.ts for p in pieces]),
        xyz=np.vstack([p.xyz for p in pieces]),
    )
    with_sleep = derive_sleep(basic_ticks, tick_ms=tick_ms)
    derived_ticks = [
        (ts, rules.fuse(basic, room, appliances))
        for (ts, basic), (room, appliances) in zip(with_sleep, tick_context)
    ]
    return DayData(
        series=series,
        events=events,
        basic_ticks=basic_ticks,
        derived_ticks=derived_ticks,
    )


def calibrate_centroids(
    noise: NoiseSpec,
    filter_spec: FilterSpec = FilterSpec(),
    window_len: int = DEFAULT_WINDOW_LEN,
    overlap_frac: float = DEFAULT_OVERLAP,
    windows_per_class: int = 200,
    classes=CLASSIFIER_CLASSES,
) -> CentroidModel:
    """Average per-class features from matched-noise synthetic motion.

    Calibration runs the exact preprocessing path used at classification
    time (repair, filter, segment, extract) so noise-induced feature
    bias cancels instead of shifting the centroids. The first two
    windows of each run are discarded as filter warm-up.

    Alongside the centroids this fits a per-feature distance scale: the
    within-class feature std pooled over classes, floored at 1% of the
    centroid spread so noiseless features cannot blow up the distance.
    Features that separate no classes and carry no variance get scale 1.

    Each class pool also includes the first windows after a switch from
    every other activity. The causal filter keeps settling into those
    windows, so folding them in widens the scale of settle-sensitive
    features (the stds) and boundary windows stay classified by the
    features a transient cannot fake (means, peak spacing, bins).
    """
    skip = 2
    period_ms = round(1000 / filter_spec.sample_rate_hz)
    hop = max(1, round(window_len * (1 - overlap_frac)))
    n_samples = (windows_per_class + skip - 1) * hop + window_len
    # Lead length is a whole number of hops so the switch lands on a
    # window start, as scripted transitions do on the tick grid.
    lead_n = hop * max(2, -(-window_len // hop))
    feats_by_class = []
    for idx, basic in enumerate(classes):
        rng = np.random.default_rng([noise.seed, 7_000_001 + idx])
        runs = [synth_motion(
            basic,
            n_samples * period_ms,
            period_ms=period_ms,
            noise=noise,
            rng=rng,
        )]
        boundary_ts = lead_n * period_ms
        for prev in classes:
            if prev == basic:
                continue
            head = synth_motion(
                prev, boundary_ts, period_ms=period_ms, noise=noise, rng=rng
            )
            tail = synth_motion(
                basic,
                (hop + window_len) * period_ms,
                period_ms=period_ms,
                noise=noise,
                start_ts=boundary_ts,
                rng=rng,
            )
            runs.append(SampleSeries(
                subject_id=head.subject_id,
                period_ms=period_ms,
                ts=np.concatenate([head.ts, tail.ts]),
                xyz=np.vstack([head.xyz, tail.xyz]),
            ))
        feats = []
        for run_idx, run in enumerate(runs):
            kept = 0
            for piece in interpolate_gaps(run):
                filtered = butterworth_lowpass(piece, filter_spec)
                for w in segment(filtered, window_len, overlap_frac):
                    if run_idx == 0:
                        feats.append(extract_features(w))
                    elif w.start_ts >= boundary_ts and kept < 2:
                        feats.append(extract_features(w))
                        kept += 1
            if run_idx == 0:
                del feats[:skip]
        feats_by_class.append(np.vstack(feats))
    centroids = np.vstack([f.mean(axis=0) for f in feats_by_class])
    pooled = np.sqrt(np.mean([f.var(axis=0) for f in feats_by_class], axis=0))
    spread = centroids.max(axis=0) - centroids.min(axis=0)
    scale = np.maximum(pooled, 0.01 * spread)
    scale[scale == 0] = 1.0
    return CentroidModel(
        class_names=tuple(classes),
        centroids=centroids,
        layout=layout_for(False),
        scale=scale,
    )
