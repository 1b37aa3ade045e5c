"""Command-line entry point exposing every stage and the full pipeline.

Option precedence is flags over config file over built-in defaults; the
effective configuration is echoed to stderr at startup so runs are
auditable. All outputs are deterministic given the same configuration
and seed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import fusion, labelling, neural, pipeline, simulate, timeseries

DEFAULTS = {
    "order": 3,
    "cutoff_hz": 3.0,
    "sample_rate_hz": 20.0,
    "max_gap_ms": timeseries.DEFAULT_MAX_GAP_MS,
    "window_len": timeseries.DEFAULT_WINDOW_LEN,
    "overlap": timeseries.DEFAULT_OVERLAP,
    "span": 2,
    "timezone": "UTC",
    "sigma": "0",
    "dropout": 0.0,
    "seed": 0,
    "tick_ms": fusion.DEFAULT_TICK_MS,
    "min_still_ms": fusion.DEFAULT_MIN_STILL_MS,
    "days": 1,
    "start_day_ms": 0,
    "subject": "sim",
    "timeout_ms": None,
    "format": "json",
    "gyro": False,
    "probs": None,
    "model": None,
    "rules": None,
    "priorities": None,
    "script": None,
    "inertial": None,
    "events": None,
}


def _parse_sigma(value) -> tuple[float, float, float]:
    if isinstance(value, (int, float)):
        return (float(value),) * 3
    parts = [float(p) for p in str(value).split(",")]
    if len(parts) == 1:
        return (parts[0],) * 3
    if len(parts) == 3:
        return tuple(parts)
    raise ValueError(f"sigma must be one value or three, got {value!r}")


def _effective(args: argparse.Namespace, keys) -> dict:
    config = {}
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            config = json.load(fh)
        if not isinstance(config, dict):
            raise ValueError(f"{args.config}: config must be a JSON object")
        unknown = set(config) - set(DEFAULTS)
        if unknown:
            raise ValueError(f"{args.config}: unknown config keys {sorted(unknown)}")
    eff = {}
    for key in keys:
        flag = getattr(args, key, None)
        if flag is not None:
            eff[key] = flag
        elif key in config:
            eff[key] = config[key]
        else:
            eff[key] = DEFAULTS[key]
    return eff


def _echo_config(command: str, eff: dict) -> None:
    doc = {"command": command, **{k: str(v) if isinstance(v, Path) else v for k, v in eff.items()}}
    print(f"config: {json.dumps(doc, sort_keys=True)}", file=sys.stderr)


def _filter_spec(eff) -> timeseries.FilterSpec:
    return timeseries.FilterSpec(
        order=int(eff["order"]),
        cutoff_hz=float(eff["cutoff_hz"]),
        sample_rate_hz=float(eff["sample_rate_hz"]),
    )


def _noise(eff) -> simulate.NoiseSpec:
    return simulate.NoiseSpec(
        gaussian_sigma=_parse_sigma(eff["sigma"]),
        dropout_prob=float(eff["dropout"]),
        seed=int(eff["seed"]),
    )


def _rules(eff) -> fusion.FusionRuleTable:
    if eff["rules"]:
        return fusion.load_rules(eff["rules"])
    return fusion.load_default_rules()


def _priorities(eff) -> labelling.PriorityTable:
    if eff["priorities"]:
        return labelling.load_priorities(eff["priorities"])
    return labelling.load_default_priorities()


def _add_common(sub: argparse.ArgumentParser, *names) -> None:
    flags = {
        "config": lambda: sub.add_argument("--config", help="JSON file of option defaults"),
        "order": lambda: sub.add_argument("--order", type=int),
        "cutoff_hz": lambda: sub.add_argument("--cutoff-hz", type=float, dest="cutoff_hz"),
        "sample_rate_hz": lambda: sub.add_argument(
            "--sample-rate-hz", type=float, dest="sample_rate_hz"
        ),
        "max_gap_ms": lambda: sub.add_argument("--max-gap-ms", type=int, dest="max_gap_ms"),
        "window_len": lambda: sub.add_argument("--window-len", type=int, dest="window_len"),
        "overlap": lambda: sub.add_argument("--overlap", type=float),
        "span": lambda: sub.add_argument("--span", type=int),
        "timezone": lambda: sub.add_argument("--timezone"),
        "sigma": lambda: sub.add_argument("--sigma", help="gaussian sigma, scalar or x,y,z"),
        "dropout": lambda: sub.add_argument("--dropout", type=float),
        "seed": lambda: sub.add_argument("--seed", type=int),
        "tick_ms": lambda: sub.add_argument("--tick-ms", type=int, dest="tick_ms"),
        "min_still_ms": lambda: sub.add_argument(
            "--min-still-ms", type=int, dest="min_still_ms"
        ),
        "days": lambda: sub.add_argument("--days", type=int),
        "start_day_ms": lambda: sub.add_argument(
            "--start-day-ms", type=int, dest="start_day_ms"
        ),
        "subject": lambda: sub.add_argument("--subject"),
        "timeout_ms": lambda: sub.add_argument("--timeout-ms", type=int, dest="timeout_ms"),
        "rules": lambda: sub.add_argument("--rules", help="fusion rule CSV"),
        "priorities": lambda: sub.add_argument("--priorities", help="priority CSV"),
        "model": lambda: sub.add_argument("--model", help="centroid or weights JSON"),
    }
    for name in names:
        flags[name]()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="homeactivity",
        description="Activity recognition pipeline over inertial and ambient sensor logs",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("simulate", help="run a daily script into sensor logs")
    p.add_argument("--script", required=True)
    p.add_argument("--out", required=True, help="output directory")
    _add_common(p, "config", "days", "start_day_ms", "sigma", "dropout", "seed",
                "rules", "tick_ms", "subject")

    p = subs.add_parser("filter", help="gap-repair and low-pass an inertial log")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--out", required=True)
    _add_common(p, "config", "order", "cutoff_hz", "sample_rate_hz", "max_gap_ms")

    p = subs.add_parser("segment", help="write the sliding-window plan")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--out", required=True)
    _add_common(p, "config", "window_len", "overlap")

    p = subs.add_parser("features", help="extract per-window feature vectors")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--gyro", action="store_const", const=True)
    _add_common(p, "config", "window_len", "overlap")

    p = subs.add_parser("classify", help="label windows with a model file")
    p.add_argument("--in", dest="in_path", required=True,
                   help="feature file (centroids) or filtered log (bundle)")
    p.add_argument("--out", required=True)
    p.add_argument("--probs", help="also write per-class probabilities (bundle only)")
    _add_common(p, "config", "model", "window_len", "overlap")

    p = subs.add_parser("occupancy", help="events to room/appliance intervals")
    p.add_argument("--events", required=True)
    p.add_argument("--out", required=True)
    _add_common(p, "config", "timeout_ms")

    p = subs.add_parser("fuse", help="windows + intervals to derived timeline")
    p.add_argument("--windows", required=True, help="classified windows CSV")
    p.add_argument("--intervals", required=True)
    p.add_argument("--out", required=True)
    _add_common(p, "config", "rules", "tick_ms", "min_still_ms")

    p = subs.add_parser("label", help="derived timeline to profiling windows")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--out", required=True)
    _add_common(p, "config", "span", "priorities")

    p = subs.add_parser("profile", help="window labels to day/week JSON report")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--out", required=True)
    _add_common(p, "config", "timezone")

    p = subs.add_parser("report", help="window labels to json or plot-ready csv")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("json", "csv"))
    _add_common(p, "config", "timezone")

    p = subs.add_parser("pipeline", help="chain every stage into a directory")
    p.add_argument("--script", help="simulate this daily script first")
    p.add_argument("--inertial", help="existing inertial log")
    p.add_argument("--events", help="existing ambient event log")
    p.add_argument("--out", required=True, help="output directory")
    _add_common(p, "config", "days", "start_day_ms", "sigma", "dropout", "seed",
                "rules", "priorities", "model", "order", "cutoff_hz",
                "sample_rate_hz", "max_gap_ms", "window_len", "overlap", "span",
                "tick_ms", "min_still_ms", "timezone", "subject", "timeout_ms")
    return parser


_COMMAND_KEYS = {
    "simulate": ("days", "start_day_ms", "sigma", "dropout", "seed", "rules",
                 "tick_ms", "subject"),
    "filter": ("order", "cutoff_hz", "sample_rate_hz", "max_gap_ms"),
    "segment": ("window_len", "overlap"),
    "features": ("window_len", "overlap", "gyro"),
    "classify": ("model", "window_len", "overlap", "probs"),
    "occupancy": ("timeout_ms",),
    "fuse": ("rules", "tick_ms", "min_still_ms"),
    "label": ("span", "priorities"),
    "profile": ("timezone",),
    "report": ("timezone", "format"),
    "pipeline": ("script", "inertial", "events", "days", "start_day_ms", "sigma",
                 "dropout", "seed", "rules", "priorities", "model", "order",
                 "cutoff_hz", "sample_rate_hz", "max_gap_ms", "window_len",
                 "overlap", "span", "tick_ms", "min_still_ms", "timezone",
                 "subject", "timeout_ms"),
}


def _run_pipeline(args, eff) -> None:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rules = _rules(eff)
    priorities = _priorities(eff)
    spec = _filter_spec(eff)
    noise = _noise(eff)
    window_len, overlap = int(eff["window_len"]), float(eff["overlap"])

    inertial, events = eff["inertial"], eff["events"]
    if eff["script"]:
        inertial = out / "inertial.csv"
        events = out / "events.ndjson"
        pipeline.stage_simulate(
            eff["script"], inertial, events, out / "truth_derived.csv",
            noise, rules,
            days=int(eff["days"]),
            start_day_ms=int(eff["start_day_ms"]),
            tick_ms=int(eff["tick_ms"]),
            subject_id=eff["subject"],
        )
    elif not (inertial and events):
        raise pipeline.PipelineError(
            "pipeline needs --script, or both --inertial and --events"
        )

    pipeline.stage_filter(inertial, out / "filtered.csv", spec, int(eff["max_gap_ms"]))
    pipeline.stage_features(
        out / "filtered.csv", out / "features.csv", window_len, overlap
    )

    model = eff["model"]
    if model is None:
        centroids = simulate.calibrate_centroids(noise, spec, window_len, overlap)
        model = out / "centroids.json"
        neural.save_centroids(model, centroids)
    classify_in = (
        out / "features.csv"
        if pipeline._model_format(model) == neural.CENTROID_FORMAT
        else out / "filtered.csv"
    )
    pipeline.stage_classify(
        classify_in, model, out / "basic_windows.csv",
        window_len=window_len, overlap_frac=overlap,
    )
    pipeline.stage_occupancy(events, out / "intervals.csv", timeout_ms=eff["timeout_ms"])
    pipeline.stage_fuse(
        out / "basic_windows.csv", out / "intervals.csv", out / "derived.csv",
        rules, tick_ms=int(eff["tick_ms"]), min_still_ms=int(eff["min_still_ms"]),
    )
    pipeline.stage_label(
        out / "derived.csv", out / "window_labels.csv", int(eff["span"]), priorities
    )
    pipeline.stage_profile(out / "window_labels.csv", out / "report.json", eff["timezone"])


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        eff = _effective(args, _COMMAND_KEYS[args.command])
        _echo_config(args.command, eff)
        if args.command == "simulate":
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            pipeline.stage_simulate(
                args.script,
                out / "inertial.csv", out / "events.ndjson", out / "truth_derived.csv",
                _noise(eff), _rules(eff),
                days=int(eff["days"]),
                start_day_ms=int(eff["start_day_ms"]),
                tick_ms=int(eff["tick_ms"]),
                subject_id=eff["subject"],
            )
        elif args.command == "filter":
            pipeline.stage_filter(
                args.in_path, args.out, _filter_spec(eff), int(eff["max_gap_ms"])
            )
        elif args.command == "segment":
            pipeline.stage_segment(
                args.in_path, args.out, int(eff["window_len"]), float(eff["overlap"])
            )
        elif args.command == "features":
            pipeline.stage_features(
                args.in_path, args.out,
                int(eff["window_len"]), float(eff["overlap"]),
                include_gyro=bool(eff["gyro"]),
            )
        elif args.command == "classify":
            if not eff["model"]:
                raise pipeline.PipelineError("classify requires --model")
            pipeline.stage_classify(
                args.in_path, eff["model"], args.out, probs_path=eff["probs"],
                window_len=int(eff["window_len"]), overlap_frac=float(eff["overlap"]),
            )
        elif args.command == "occupancy":
            pipeline.stage_occupancy(args.events, args.out, timeout_ms=eff["timeout_ms"])
        elif args.command == "fuse":
            pipeline.stage_fuse(
                args.windows, args.intervals, args.out, _rules(eff),
                tick_ms=int(eff["tick_ms"]), min_still_ms=int(eff["min_still_ms"]),
            )
        elif args.command == "label":
            pipeline.stage_label(args.in_path, args.out, int(eff["span"]), _priorities(eff))
        elif args.command == "profile":
            pipeline.stage_profile(args.in_path, args.out, eff["timezone"])
        elif args.command == "report":
            pipeline.stage_report(args.in_path, args.out, eff["format"], eff["timezone"])
        elif args.command == "pipeline":
            _run_pipeline(args, eff)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
