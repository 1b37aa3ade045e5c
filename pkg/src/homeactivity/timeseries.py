"""Inertial time-series containers, gap repair, low-pass filtering, windowing.

Series are stored as numpy arrays on a millisecond epoch clock. All
operations are pure: they return new objects and never mutate inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from scipy import signal as _sig

DEFAULT_PERIOD_MS = 50
DEFAULT_WINDOW_LEN = 128
DEFAULT_OVERLAP = 0.5
DEFAULT_MAX_GAP_MS = 1000


class SeriesError(ValueError):
    """Raised for malformed or empty sample series."""


class InertialParseError(ValueError):
    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class FilterSpec:
    """Digital Butterworth low-pass design parameters."""

    order: int = 3
    cutoff_hz: float = 3.0
    sample_rate_hz: float = 20.0

    def __post_init__(self):
        if self.order < 1:
            raise ValueError(f"invalid order: {self.order}")
        if self.sample_rate_hz <= 0:
            raise ValueError(f"invalid sample rate: {self.sample_rate_hz}")
        if not (0 < self.cutoff_hz < self.sample_rate_hz / 2):
            raise ValueError(
                f"invalid cutoff: {self.cutoff_hz} Hz must lie in "
                f"(0, {self.sample_rate_hz / 2}) Hz"
            )


@dataclass(frozen=True, eq=False)
class SampleSeries:
    """Ordered triaxial accelerometer samples (optionally with gyroscope).

    ts is epoch milliseconds, strictly increasing. xyz is an (n, 3) float
    array in m/s^2; gyro, when present, is (n, 3) in rad/s.
    """

    subject_id: str
    period_ms: int
    ts: np.ndarray
    xyz: np.ndarray
    gyro: np.ndarray | None = None

    def __post_init__(self):
        if self.period_ms <= 0:
            raise SeriesError(f"nominal period must be positive, got {self.period_ms}")
        ts = np.asarray(self.ts, dtype=np.int64)
        xyz = np.asarray(self.xyz, dtype=np.float64)
        object.__setattr__(self, "ts", ts)
        object.__setattr__(self, "xyz", xyz)
        if ts.ndim != 1 or xyz.shape != (ts.size, 3):
            raise SeriesError(f"shape mismatch: ts {ts.shape} vs xyz {xyz.shape}")
        if ts.size == 0:
            raise SeriesError("empty input")
        if ts.size > 1 and not np.all(np.diff(ts) > 0):
            raise SeriesError("timestamps must be strictly increasing")
        if not np.all(np.isfinite(xyz)):
            raise SeriesError("non-finite acceleration value")
        if self.gyro is not None:
            gyro = np.asarray(self.gyro, dtype=np.float64)
            object.__setattr__(self, "gyro", gyro)
            if gyro.shape != xyz.shape:
                raise SeriesError(f"gyro shape {gyro.shape} != xyz shape {xyz.shape}")
            if not np.all(np.isfinite(gyro)):
                raise SeriesError("non-finite gyroscope value")

    def __len__(self) -> int:
        return int(self.ts.size)

    @property
    def start_ts(self) -> int:
        return int(self.ts[0])

    @property
    def end_ts(self) -> int:
        """Exclusive end: last sample timestamp plus one period."""
        return int(self.ts[-1]) + self.period_ms

    def is_grid_aligned(self) -> bool:
        return bool(np.all(np.diff(self.ts) == self.period_ms))


@dataclass(frozen=True, eq=False)
class SampleWindow:
    """Fixed-length slice of a series; [start_ts, end_ts) is half-open."""

    start_ts: int
    end_ts: int
    period_ms: int
    xyz: np.ndarray
    gyro: np.ndarray | None = None

    def __len__(self) -> int:
        return int(self.xyz.shape[0])


def series_equal(a: SampleSeries, b: SampleSeries) -> bool:
    if a.subject_id != b.subject_id or a.period_ms != b.period_ms:
        return False
    if a.ts.shape != b.ts.shape or not np.array_equal(a.ts, b.ts):
        return False
    if not np.array_equal(a.xyz, b.xyz):
        return False
    if (a.gyro is None) != (b.gyro is None):
        return False
    return a.gyro is None or np.array_equal(a.gyro, b.gyro)


def interpolate_gaps(
    series: SampleSeries, max_gap_ms: int = DEFAULT_MAX_GAP_MS
) -> list[SampleSeries]:
    """Fill sampling gaps by per-axis linear interpolation on the nominal grid.

    Consecutive samples further apart than max_gap_ms split the series:
    no synthetic points are fabricated inside such gaps. Each returned
    segment is grid-aligned at the segment's first timestamp with step
    period_ms; off-grid trailing samples that no grid point lands on are
    dropped.
    """
    if len(series) == 0:
        raise SeriesError("empty input")
    if max_gap_ms <= 0:
        raise ValueError(f"max_gap_ms must be positive, got {max_gap_ms}")

    ts = series.ts
    breaks = np.flatnonzero(np.diff(ts) > max_gap_ms)
    bounds = np.concatenate(([0], breaks + 1, [ts.size]))

    out: list[SampleSeries] = []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        seg_ts = ts[lo:hi]
        n_steps = int((seg_ts[-1] - seg_ts[0]) // series.period_ms)
        grid = seg_ts[0] + series.period_ms * np.arange(n_steps + 1, dtype=np.int64)
        xyz = np.column_stack(
            [np.interp(grid, seg_ts, series.xyz[lo:hi, k]) for k in range(3)]
        )
        gyro = None
        if series.gyro is not None:
            gyro = np.column_stack(
                [np.interp(grid, seg_ts, series.gyro[lo:hi, k]) for k in range(3)]
            )
        out.append(replace(series, ts=grid, xyz=xyz, gyro=gyro))
    return out


def butterworth_lowpass(series: SampleSeries, spec: FilterSpec) -> SampleSeries:
    """Apply a causal digital Butterworth low-pass to each axis.

    The filter is designed by bilinear transform (scipy.signal.butter) and
    run forward-only. Initial conditions are set to the step steady state
    of the first sample, so a constant signal passes through unchanged
    from sample zero. Timestamps are preserved.
    """
    if not series.is_grid_aligned():
        raise SeriesError("series must be gapless and grid-aligned before filtering")
    grid_rate = 1000.0 / series.period_ms
    if abs(grid_rate - spec.sample_rate_hz) > 1e-6 * spec.sample_rate_hz:
        raise SeriesError(
            f"filter designed for {spec.sample_rate_hz} Hz but series is "
            f"sampled at {grid_rate} Hz"
        )
    b, a = _sig.butter(spec.order, spec.cutoff_hz / (spec.sample_rate_hz / 2))
    zi = _sig.lfilter_zi(b, a)

    def run(channel: np.ndarray) -> np.ndarray:
        y, _ = _sig.lfilter(b, a, channel, zi=zi * channel[0])
        return y

    xyz = np.column_stack([run(series.xyz[:, k]) for k in range(3)])
    gyro = None
    if series.gyro is not None:
        gyro = np.column_stack([run(series.gyro[:, k]) for k in range(3)])
    return replace(series, xyz=xyz, gyro=gyro)


def segment(
    series: SampleSeries,
    window_len: int = DEFAULT_WINDOW_LEN,
    overlap_frac: float = DEFAULT_OVERLAP,
) -> list[SampleWindow]:
    """Slice a gapless series into fixed-length windows.

    hop = round(window_len * (1 - overlap_frac)), clamped to >= 1; the
    number of windows is floor((n - window_len) / hop) + 1 and any
    trailing remainder shorter than window_len is dropped. A series
    shorter than one window yields an empty list.
    """
    if window_len < 1:
        raise ValueError(f"window_len must be positive, got {window_len}")
    if not (0 <= overlap_frac < 1):
        raise ValueError(f"overlap_frac must lie in [0, 1), got {overlap_frac}")
    n = len(series)
    if n < window_len:
        return []
    hop = max(1, round(window_len * (1 - overlap_frac)))
    count = (n - window_len) // hop + 1
    windows = []
    for i in range(0, count * hop, hop):
        j = i + window_len
        windows.append(
            SampleWindow(
                start_ts=int(series.ts[i]),
                end_ts=int(series.ts[j - 1]) + series.period_ms,
                period_ms=series.period_ms,
                xyz=series.xyz[i:j].copy(),
                gyro=None if series.gyro is None else series.gyro[i:j].copy(),
            )
        )
    return windows


def split_on_gaps(series: SampleSeries) -> list[SampleSeries]:
    """Split wherever consecutive timestamps differ from the nominal period."""
    breaks = np.flatnonzero(np.diff(series.ts) != series.period_ms)
    bounds = np.concatenate(([0], breaks + 1, [series.ts.size]))
    return [
        replace(
            series,
            ts=series.ts[lo:hi],
            xyz=series.xyz[lo:hi],
            gyro=None if series.gyro is None else series.gyro[lo:hi],
        )
        for lo, hi in zip(bounds[:-1], bounds[1:])
    ]


# Line format, WISDM-compatible:
#   subject_id,activity_hint,timestamp_ms,ax,ay,az[,gx,gy,gz];
# The hint field may be empty and the trailing semicolon is optional.


def parse_inertial_line(line: str, lineno: int | None = None):
    parts = line.strip().rstrip(";").split(",")
    if len(parts) not in (6, 9):
        raise InertialParseError(
            f"expected 6 or 9 comma-separated fields, got {len(parts)}", lineno
        )
    try:
        ts = int(parts[2])
        values = [float(v) for v in parts[3:]]
    except ValueError as exc:
        raise InertialParseError(str(exc), lineno) from None
    if not all(np.isfinite(values)):
        raise InertialParseError("non-finite sample value", lineno)
    return parts[0], parts[1], ts, values


def load_inertial(
    path: str | Path, period_ms: int = DEFAULT_PERIOD_MS
) -> list[SampleSeries]:
    """Read an inertial log, returning one series per subject_id.

    Subjects are returned in order of first appearance; samples keep file
    order and must be strictly increasing in time per subject.
    """
    rows: dict[str, list] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                subject, _hint, ts, values = parse_inertial_line(line, lineno)
            except InertialParseError as exc:
                raise InertialParseError(f"{path}: {exc}") from None
            rows.setdefault(subject, []).append((ts, values))
    if not rows:
        raise SeriesError("empty input")
    out = []
    for subject, samples in rows.items():
        if len({len(s[1]) for s in samples}) != 1:
            raise SeriesError(f"{path}: subject {subject!r} mixes 6- and 9-field lines")
        ts = np.array([s[0] for s in samples], dtype=np.int64)
        data = np.array([s[1] for s in samples], dtype=np.float64)
        gyro = data[:, 3:6] if data.shape[1] == 6 else None
        out.append(
            SampleSeries(
                subject_id=subject,
                period_ms=period_ms,
                ts=ts,
                xyz=data[:, 0:3],
                gyro=gyro,
            )
        )
    return out


def write_inertial(
    path: str | Path,
    series: SampleSeries,
    hints: list[str] | None = None,
    append: bool = False,
) -> None:
    if hints is not None and len(hints) != len(series):
        raise ValueError("one hint per sample required")
    mode = "a" if append else "w"
    with open(path, mode, encoding="utf-8") as fh:
        for i in range(len(series)):
            hint = hints[i] if hints is not None else ""
            fields = [series.subject_id, hint, str(int(series.ts[i]))]
            fields += [f"{v:.6f}" for v in series.xyz[i]]
            if series.gyro is not None:
                fields += [f"{v:.6f}" for v in series.gyro[i]]
            fh.write(",".join(fields) + ";\n")
