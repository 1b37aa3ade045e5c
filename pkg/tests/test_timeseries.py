"""Inertial stream handling: parsing, gap repair, filtering, windowing."""

import numpy as np
import pytest

from homeactivity.timeseries import (
    DEFAULT_PERIOD_MS,
    FilterSpec,
    InertialParseError,
    SampleSeries,
    SeriesError,
    butterworth_lowpass,
    interpolate_gaps,
    load_inertial,
    parse_inertial_line,
    segment,
    series_equal,
    split_on_gaps,
    write_inertial,
)


def make_series(values, period_ms=50, start=0, subject="s1"):
    values = np.asarray(values, dtype=np.float64)
    if values.ndim == 1:
        values = np.column_stack([values, values, values])
    ts = start + period_ms * np.arange(values.shape[0], dtype=np.int64)
    return SampleSeries(subject_id=subject, period_ms=period_ms, ts=ts, xyz=values)


class TestSampleSeries:
    def test_timestamps_must_increase(self):
        with pytest.raises(SeriesError, match="increasing"):
            SampleSeries(
                subject_id="s",
                period_ms=50,
                ts=np.array([0, 50, 50]),
                xyz=np.zeros((3, 3)),
            )

    def test_shape_mismatch_rejected(self):
        with pytest.raises(SeriesError):
            SampleSeries(
                subject_id="s",
                period_ms=50,
                ts=np.array([0, 50]),
                xyz=np.zeros((3, 3)),
            )

    def test_end_ts_is_exclusive(self):
        s = make_series([1.0, 2.0, 3.0], period_ms=50, start=100)
        assert s.end_ts == 100 + 3 * 50

    def test_grid_alignment(self):
        s = make_series([1.0, 2.0, 3.0])
        assert s.is_grid_aligned()
        gappy = SampleSeries(
            subject_id="s",
            period_ms=50,
            ts=np.array([0, 50, 150]),
            xyz=np.zeros((3, 3)),
        )
        assert not gappy.is_grid_aligned()


class TestInertialFormat:
    def test_parse_accel_line(self):
        subject, hint, ts, vals = parse_inertial_line("33,Jogging,1000,0.5,9.8,-1.25;")
        assert (subject, hint, ts) == ("33", "Jogging", 1000)
        assert vals == [0.5, 9.8, -1.25]

    def test_parse_gyro_line(self):
        _, _, _, vals = parse_inertial_line("u,,0,1,2,3,4,5,6")
        assert vals == [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]

    def test_field_count_checked(self):
        with pytest.raises(InertialParseError, match="6 or 9"):
            parse_inertial_line("u,,0,1,2")

    def test_non_finite_rejected(self):
        with pytest.raises(InertialParseError, match="non-finite"):
            parse_inertial_line("u,,0,1,nan,3")

    def test_roundtrip(self, tmp_path):
        s = make_series(np.linspace(-2, 2, 7))
        path = tmp_path / "log.csv"
        write_inertial(path, s)
        (back,) = load_inertial(path)
        assert back.subject_id == s.subject_id
        assert np.array_equal(back.ts, s.ts)
        np.testing.assert_allclose(back.xyz, s.xyz, atol=5e-7)

    def test_subjects_split_in_first_seen_order(self, tmp_path):
        path = tmp_path / "log.csv"
        path.write_text(
            "b,,0,1,1,1;\n" "a,,0,2,2,2;\n" "b,,50,1,1,1;\n",
            encoding="utf-8",
        )
        series = load_inertial(path)
        assert [s.subject_id for s in series] == ["b", "a"]
        assert len(series[0]) == 2 and len(series[1]) == 1

    def test_error_names_file_and_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("u,,0,1,2,3;\nu,,50,oops,2,3;\n", encoding="utf-8")
        with pytest.raises(InertialParseError, match=r"bad\.csv.*line 2"):
            load_inertial(path)

    def test_mixed_widths_rejected(self, tmp_path):
        path = tmp_path / "log.csv"
        path.write_text("u,,0,1,2,3;\nu,,50,1,2,3,4,5,6;\n", encoding="utf-8")
        with pytest.raises(SeriesError, match="mixes"):
            load_inertial(path)


class TestInterpolateGaps:
    def test_small_gap_filled_linearly(self):
        # samples at 0,50,200: the 150 ms hole gets grid points 100,150
        ts = np.array([0, 50, 200], dtype=np.int64)
        xyz = np.array([[0, 0, 0], [1, 10, -1], [4, 40, -4]], dtype=np.float64)
        s = SampleSeries(subject_id="s", period_ms=50, ts=ts, xyz=xyz)
        (out,) = interpolate_gaps(s, max_gap_ms=1000)
        assert np.array_equal(out.ts, [0, 50, 100, 150, 200])
        expected = np.interp([0, 50, 100, 150, 200], ts, xyz[:, 0])
        np.testing.assert_allclose(out.xyz[:, 0], expected)
        np.testing.assert_allclose(out.xyz[2], [2.0, 20.0, -2.0])

    def test_existing_samples_preserved(self):
        s = make_series(np.sin(np.arange(10)))
        (out,) = interpolate_gaps(s)
        assert series_equal(out, s)

    def test_large_gap_splits(self):
        ts = np.array([0, 50, 2000, 2050], dtype=np.int64)
        s = SampleSeries(
            subject_id="s", period_ms=50, ts=ts, xyz=np.ones((4, 3))
        )
        pieces = interpolate_gaps(s, max_gap_ms=1000)
        assert [p.ts[0] for p in pieces] == [0, 2000]
        assert all(len(p) == 2 for p in pieces)

    def test_gap_at_threshold_is_filled(self):
        ts = np.array([0, 1000], dtype=np.int64)
        s = SampleSeries(
            subject_id="s", period_ms=50, ts=ts, xyz=np.ones((2, 3))
        )
        (out,) = interpolate_gaps(s, max_gap_ms=1000)
        assert len(out) == 21  # 0..1000 inclusive on the 50 ms grid

    def test_off_grid_samples_resampled(self):
        ts = np.array([0, 30, 100], dtype=np.int64)
        xyz = np.array([[0.0] * 3, [3.0] * 3, [10.0] * 3])
        s = SampleSeries(subject_id="s", period_ms=50, ts=ts, xyz=xyz)
        (out,) = interpolate_gaps(s)
        assert np.array_equal(out.ts, [0, 50, 100])
        np.testing.assert_allclose(out.xyz[1], [5.0, 5.0, 5.0])


class TestButterworth:
    def test_spec_validation(self):
        with pytest.raises(ValueError, match="invalid cutoff"):
            FilterSpec(cutoff_hz=10.0, sample_rate_hz=20.0)
        with pytest.raises(ValueError):
            FilterSpec(order=0)

    def test_constant_passes_from_sample_zero(self):
        s = make_series(np.full(64, 7.25))
        out = butterworth_lowpass(s, FilterSpec())
        np.testing.assert_allclose(out.xyz, s.xyz, atol=1e-9)

    def test_is_linear_operator(self):
        rng = np.random.default_rng(5)
        a = make_series(rng.normal(size=128))
        b = make_series(rng.normal(size=128))
        spec = FilterSpec()
        lhs = butterworth_lowpass(
            make_series(2.5 * a.xyz[:, 0] - 1.5 * b.xyz[:, 0]), spec
        ).xyz
        rhs = 2.5 * butterworth_lowpass(a, spec).xyz - 1.5 * butterworth_lowpass(
            b, spec
        ).xyz
        np.testing.assert_allclose(lhs, rhs, atol=1e-9)

    def test_high_tone_attenuated(self):
        t = np.arange(400) / 20.0
        s = make_series(np.sin(2 * np.pi * 8.0 * t))
        out = butterworth_lowpass(s, FilterSpec(order=3, cutoff_hz=3.0))
        steady = out.xyz[200:, 0]
        assert np.abs(steady).max() <= 0.1

    def test_requires_grid_alignment(self):
        s = SampleSeries(
            subject_id="s",
            period_ms=50,
            ts=np.array([0, 50, 150]),
            xyz=np.zeros((3, 3)),
        )
        with pytest.raises(SeriesError, match="grid"):
            butterworth_lowpass(s, FilterSpec())

    def test_rate_mismatch_detected(self):
        s = make_series(np.zeros(8), period_ms=100)
        with pytest.raises(SeriesError, match="sampled at"):
            butterworth_lowpass(s, FilterSpec(sample_rate_hz=20.0))


class TestSegment:
    def test_default_window_plan(self):
        s = make_series(np.arange(256, dtype=np.float64))
        windows = segment(s)
        assert len(windows) == 3  # hop 64: starts at 0, 64, 128
        assert [w.start_ts for w in windows] == [0, 3200, 6400]
        assert all(len(w) == 128 for w in windows)
        np.testing.assert_array_equal(windows[1].xyz[:, 0], np.arange(64, 192))

    def test_window_end_is_exclusive(self):
        s = make_series(np.zeros(128))
        (w,) = segment(s)
        assert w.end_ts == 128 * 50

    def test_short_series_yields_nothing(self):
        assert segment(make_series(np.zeros(127))) == []

    def test_count_formula_holds(self):
        rng = np.random.default_rng(17)
        for _ in range(300):
            w = int(rng.integers(1, 200))
            n = int(rng.integers(w, 4 * w + 1))
            f = float(rng.uniform(0, 0.95))
            hop = max(1, round(w * (1 - f)))
            got = segment(make_series(np.zeros(n)), w, f)
            assert len(got) == (n - w) // hop + 1

    def test_overlap_bounds_checked(self):
        s = make_series(np.zeros(16))
        with pytest.raises(ValueError):
            segment(s, 8, 1.0)
        with pytest.raises(ValueError):
            segment(s, 0, 0.5)


def test_split_on_gaps():
    ts = np.array([0, 50, 100, 250, 300], dtype=np.int64)
    s = SampleSeries(subject_id="s", period_ms=50, ts=ts, xyz=np.zeros((5, 3)))
    parts = split_on_gaps(s)
    assert [len(p) for p in parts] == [3, 2]
    assert parts[1].ts[0] == 250


def test_default_period_matches_20hz():
    assert DEFAULT_PERIOD_MS == 50
