"""File-level pipeline stages.

Each stage reads and writes the module file formats, so chaining the
stage functions is exactly equivalent to chaining the CLI subcommands;
the `pipeline` command calls these same functions in order. Every
writer is deterministic (fixed float formats, sorted keys), which makes
byte-level comparison of two runs meaningful.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from . import (
    ambient,
    features,
    fusion,
    labelling,
    neural,
    occupancy,
    profiles,
    simulate,
    timeseries,
)

MS_PER_DAY = simulate.MS_PER_DAY


class PipelineError(ValueError):
    """Raised when a stage's inputs are unusable."""


def _single_series(path) -> timeseries.SampleSeries:
    series = timeseries.load_inertial(path)
    if len(series) != 1:
        subjects = ", ".join(s.subject_id for s in series)
        raise PipelineError(
            f"{path}: expected a single subject, found {len(series)} ({subjects})"
        )
    return series[0]


def write_basic_windows(path, windows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["window_start", "window_end", "label"])
        for start, end, label in windows:
            writer.writerow([start, end, label])


def read_basic_windows(path) -> list[tuple[int, int, str]]:
    out = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            out.append((int(row["window_start"]), int(row["window_end"]), row["label"]))
    return out


def ticks_from_windows(windows, tick_ms: int = fusion.DEFAULT_TICK_MS):
    """Resample per-window labels onto a fixed tick grid.

    windows is an ordered (start, end, label) list of equal-length,
    possibly overlapping windows; each tick takes the label of the
    latest-starting window that covers it, and ticks in coverage holes
    are omitted.
    """
    windows = list(windows)
    if not windows:
        return []
    ticks = []
    idx = 0
    t = windows[0][0]
    while t < windows[-1][1]:
        while idx + 1 < len(windows) and windows[idx + 1][0] <= t:
            idx += 1
        if windows[idx][0] <= t < windows[idx][1]:
            ticks.append((t, windows[idx][2]))
        t += tick_ms
    return ticks


def stage_simulate(
    script_path,
    out_inertial,
    out_events,
    out_truth,
    noise: simulate.NoiseSpec,
    rules: fusion.FusionRuleTable,
    days: int = 1,
    start_day_ms: int = 0,
    tick_ms: int = fusion.DEFAULT_TICK_MS,
    subject_id: str = "sim",
) -> dict:
    """Run the daily script for `days` consecutive days and write the
    inertial log, ambient event log, and ground-truth derived timeline."""
    if days < 1:
        raise PipelineError(f"days must be positive, got {days}")
    script = simulate.load_script(script_path)
    all_events = []
    truth = []
    for day in range(days):
        data = simulate.generate_day(
            script,
            noise,
            rules,
            day_start_ms=start_day_ms + day * MS_PER_DAY,
            tick_ms=tick_ms,
            subject_id=subject_id,
        )
        timeseries.write_inertial(out_inertial, data.series, append=day > 0)
        all_events.append(data.events)
        truth.extend(data.derived_ticks)
    ambient.write_events(out_events, ambient.merge_streams(all_events))
    fusion.write_derived(out_truth, truth)
    return {"days": days, "truth_ticks": len(truth)}


def stage_filter(
    in_path,
    out_path,
    spec: timeseries.FilterSpec = timeseries.FilterSpec(),
    max_gap_ms: int = timeseries.DEFAULT_MAX_GAP_MS,
) -> dict:
    """Gap-repair then low-pass one subject's log; gaps wider than
    max_gap_ms survive as timestamp jumps in the output."""
    series = _single_series(in_path)
    pieces = timeseries.interpolate_gaps(series, max_gap_ms)
    for i, piece in enumerate(pieces):
        filtered = timeseries.butterworth_lowpass(piece, spec)
        timeseries.write_inertial(out_path, filtered, append=i > 0)
    return {"pieces": len(pieces), "samples": sum(len(p) for p in pieces)}


def stage_segment(
    in_path,
    out_path,
    window_len: int = timeseries.DEFAULT_WINDOW_LEN,
    overlap_frac: float = timeseries.DEFAULT_OVERLAP,
) -> dict:
    """Write the window plan (spans only) for a repaired log."""
    series = _single_series(in_path)
    count = 0
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["window_start", "window_end"])
        for piece in timeseries.split_on_gaps(series):
            for w in timeseries.segment(piece, window_len, overlap_frac):
                writer.writerow([w.start_ts, w.end_ts])
                count += 1
    return {"windows": count}


def stage_features(
    in_path,
    out_path,
    window_len: int = timeseries.DEFAULT_WINDOW_LEN,
    overlap_frac: float = timeseries.DEFAULT_OVERLAP,
    include_gyro: bool = False,
) -> dict:
    series = _single_series(in_path)
    windows = []
    for piece in timeseries.split_on_gaps(series):
        windows.extend(timeseries.segment(piece, window_len, overlap_frac))
    if not windows:
        raise PipelineError(f"{in_path}: no complete window of {window_len} samples")
    matrix, spans = features.extract_all(windows, include_gyro)
    layout = features.layout_for(include_gyro)
    features.write_features(out_path, matrix, spans, layout)
    return {"windows": len(windows), "layout": layout}


def _model_format(path) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh).get("format", "")


def stage_classify(
    in_path,
    model_path,
    out_path,
    probs_path=None,
    window_len: int = timeseries.DEFAULT_WINDOW_LEN,
    overlap_frac: float = timeseries.DEFAULT_OVERLAP,
) -> dict:
    """Label windows with either model kind.

    A centroid model reads a feature file; a weights bundle reads a
    filtered inertial log and can also emit per-class probabilities.
    """
    fmt = _model_format(model_path)
    rows = []
    probs_rows = None
    if fmt == neural.CENTROID_FORMAT:
        model = neural.load_centroids(model_path)
        matrix, spans, _layout = features.read_features(in_path, model.layout)
        for (start, end), vec in zip(spans, matrix):
            rows.append((start, end, model.classify(vec)))
        class_names = model.class_names
    elif fmt == neural.BUNDLE_FORMAT:
        bundle = neural.load_bundle(model_path)
        series = _single_series(in_path)
        probs_rows = []
        for piece in timeseries.split_on_gaps(series):
            for w in timeseries.segment(piece, window_len, overlap_frac):
                probs = neural.forward_bundle(bundle, w.xyz)
                best = min(
                    bundle.class_names[i]
                    for i in range(len(probs))
                    if probs[i] == probs.max()
                )
                rows.append((w.start_ts, w.end_ts, best))
                probs_rows.append((w.start_ts, w.end_ts, probs))
        class_names = bundle.class_names
    else:
        raise PipelineError(f"{model_path}: unrecognized model format {fmt!r}")
    write_basic_windows(out_path, rows)
    if probs_path is not None:
        if probs_rows is None:
            raise PipelineError("probability output requires a weights bundle")
        with open(probs_path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["window_start", "window_end"] + list(class_names))
            for start, end, probs in probs_rows:
                writer.writerow([start, end] + [f"{p:.9g}" for p in probs])
    return {"windows": len(rows), "model": fmt}


def stage_occupancy(
    events_path,
    out_path,
    timeout_ms: int | None = None,
) -> dict:
    """Detect room and appliance intervals; room overlaps are resolved
    to the single-occupant timeline before writing."""
    events = ambient.load_events(events_path)
    rooms = occupancy.resolve_single_person(
        occupancy.detect_room_intervals(events, timeout_ms=timeout_ms)
    )
    appliances = occupancy.appliance_intervals(events, timeout_ms=timeout_ms)
    occupancy.write_intervals(out_path, sorted(rooms + appliances))
    return {"rooms": len(rooms), "appliances": len(appliances)}


def stage_fuse(
    windows_path,
    intervals_path,
    out_path,
    rules: fusion.FusionRuleTable,
    tick_ms: int = fusion.DEFAULT_TICK_MS,
    min_still_ms: int = fusion.DEFAULT_MIN_STILL_MS,
) -> dict:
    """Resample classified windows to ticks, apply the sleep rule, and
    fuse with room occupancy and appliance state."""
    basic_windows = read_basic_windows(windows_path)
    intervals = occupancy.read_intervals(intervals_path)
    rooms = [iv for iv in intervals if iv.kind == "pir"]
    appliances = [iv for iv in intervals if iv.kind != "pir"]
    ticks = ticks_from_windows(basic_windows, tick_ms)
    with_sleep = fusion.derive_sleep(ticks, min_still_ms=min_still_ms, tick_ms=tick_ms)
    derived = [
        (ts, rules.fuse(basic, occupancy.locate(rooms, ts), occupancy.active_at(appliances, ts)))
        for ts, basic in with_sleep
    ]
    fusion.write_derived(out_path, derived)
    return {"ticks": len(derived)}


def stage_label(
    derived_path,
    out_path,
    span_minutes: int,
    priorities: labelling.PriorityTable,
) -> dict:
    timeline = [(ts, d.name) for ts, d in fusion.read_derived(derived_path)]
    windows = labelling.windowize(timeline, span_minutes, priorities)
    labelling.write_window_labels(out_path, windows)
    return {"windows": len(windows)}


def _day_profiles(windows_path, tz):
    windows = labelling.read_window_labels(windows_path)
    if not windows:
        raise PipelineError(f"{windows_path}: no windows to profile")
    return [profiles.day_profile(day, tz) for day in profiles.split_days(windows, tz)]


def stage_profile(windows_path, out_path, tz="UTC") -> dict:
    """Day reports, plus a week report when exactly 7 days are present."""
    days = _day_profiles(windows_path, tz)
    doc = {"days": [profiles.day_report(p) for p in days]}
    doc["week"] = (
        profiles.week_report(profiles.week_profile(days)) if len(days) == 7 else None
    )
    profiles.write_report_json(out_path, doc)
    return {"days": len(days)}


def stage_report(windows_path, out_path, fmt: str = "json", tz="UTC") -> dict:
    days = _day_profiles(windows_path, tz)
    if fmt == "json":
        return stage_profile(windows_path, out_path, tz)
    if fmt != "csv":
        raise PipelineError(f"unknown report format {fmt!r}")
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["day", "label", "duration_ms", "share"])
        for p in days:
            doc = profiles.day_report(p)
            for row in doc["activities"]:
                writer.writerow(
                    [doc["day"], row["label"], row["duration_ms"], f"{row['share']:.6f}"]
                )
            if p.nodata_ms > 0:
                share = p.nodata_ms / p.coverage_ms if p.coverage_ms else 0.0
                writer.writerow(
                    [doc["day"], labelling.NO_DATA, p.nodata_ms, f"{share:.6f}"]
                )
    return {"days": len(days)}
