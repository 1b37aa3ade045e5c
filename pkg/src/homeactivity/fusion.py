"""Fuse basic activities with room and appliance context into derived labels.

The rule table lives in a CSV data file (columns basic, room, appliance,
derived_name, flag) so a household can rewrite what counts as Unnatural
without touching code. Lookup precedence: appliance-bound rules first
(water_bottle, then mirror_bulb, bathroom_switch, tv), then exact
(basic, room) rules, then room wildcards, then a catch-all default.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .ambient import APPLIANCES, ROOMS

BASIC_ACTIVITIES = ("Walk", "Jog", "Sit", "Stand", "Lie", "Sleep", "StairUp", "StairDown")
FLAGS = ("Normal", "Unnatural", "Anomaly")
APPLIANCE_PRECEDENCE = ("water_bottle", "mirror_bulb", "bathroom_switch", "tv")

DEFAULT_MIN_STILL_MS = 300_000
DEFAULT_TICK_MS = 5_000


class RuleFileError(ValueError):
    """Raised when a fusion rule file fails validation."""


@dataclass(frozen=True, order=True)
class DerivedActivity:
    name: str
    flag: str = "Normal"

    def __post_init__(self):
        if self.flag not in FLAGS:
            raise ValueError(f"unknown flag {self.flag!r}")


@dataclass(frozen=True)
class FusionRule:
    """One row; None fields are wildcards."""

    basic: str | None
    room: str | None
    appliance: str | None
    derived: DerivedActivity

    def matches(self, basic, room, appliances) -> bool:
        if self.appliance is not None and self.appliance not in appliances:
            return False
        if self.basic is not None and self.basic != basic:
            return False
        if self.room is not None and self.room != room:
            return False
        return True

    @property
    def specificity(self) -> int:
        return sum(f is not None for f in (self.basic, self.room))


DEFAULT_RULE = DerivedActivity("Unknown", "Unnatural")


class FusionRuleTable:
    """Immutable ordered rule set with a total, deterministic lookup."""

    def __init__(self, rules, default: DerivedActivity = DEFAULT_RULE):
        self.rules = tuple(rules)
        self.default = default
        # Appliance rules resolve by appliance precedence, then by how
        # many context fields they bind, then file order.
        order = {name: i for i, name in enumerate(APPLIANCE_PRECEDENCE)}
        self._appliance_rules = sorted(
            (r for r in self.rules if r.appliance is not None),
            key=lambda r: (order[r.appliance], -r.specificity),
        )
        self._context_rules = [r for r in self.rules if r.appliance is None]

    def fuse(self, basic, room, appliances=frozenset()) -> DerivedActivity:
        if basic is not None and basic not in BASIC_ACTIVITIES:
            raise ValueError(f"unknown basic activity {basic!r}")
        if room not in ROOMS:
            raise ValueError(f"unknown room {room!r}")
        for rule in self._appliance_rules:
            if rule.matches(basic, room, appliances):
                return rule.derived
        for want_specificity in (2, 1, 0):
            for rule in self._context_rules:
                if rule.specificity == want_specificity and rule.matches(
                    basic, room, appliances
                ):
                    return rule.derived
        return self.default

    def names(self) -> tuple[str, ...]:
        """All derived names, in rule order, without duplicates."""
        seen = dict.fromkeys(r.derived.name for r in self.rules)
        seen.setdefault(self.default.name)
        return tuple(seen)


def _parse_rule_row(row: dict, lineno: int) -> FusionRule:
    basic = row["basic"].strip() or None
    room = row["room"].strip() or None
    appliance = row["appliance"].strip() or None
    name = row["derived_name"].strip()
    flag = row["flag"].strip()
    if basic is not None and basic not in BASIC_ACTIVITIES:
        raise RuleFileError(f"line {lineno}: unknown basic activity {basic!r}")
    if room is not None and room not in ROOMS:
        raise RuleFileError(f"line {lineno}: unknown room {room!r}")
    if appliance is not None and appliance not in APPLIANCES:
        raise RuleFileError(f"line {lineno}: unknown appliance {appliance!r}")
    if not name:
        raise RuleFileError(f"line {lineno}: empty derived_name")
    if flag not in FLAGS:
        raise RuleFileError(f"line {lineno}: unknown flag {flag!r}")
    if basic is None and room is None and appliance is None:
        raise RuleFileError(f"line {lineno}: rule matches everything")
    return FusionRule(basic, room, appliance, DerivedActivity(name, flag))


def load_rules(path: str | Path) -> FusionRuleTable:
    rules = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        header = None
        for lineno, line in enumerate(fh, start=1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            fields = next(csv.reader([line]))
            if header is None:
                header = [f.strip() for f in fields]
                if header != ["basic", "room", "appliance", "derived_name", "flag"]:
                    raise RuleFileError(f"line {lineno}: unexpected header {header}")
                continue
            rules.append(_parse_rule_row(dict(zip(header, fields)), lineno))
    if not rules:
        raise RuleFileError("rule file contains no rules")
    return FusionRuleTable(rules)


def write_rules(path: str | Path, table: FusionRuleTable) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["basic", "room", "appliance", "derived_name", "flag"])
        for r in table.rules:
            writer.writerow(
                [r.basic or "", r.room or "", r.appliance or "", r.derived.name, r.derived.flag]
            )


def default_rules_path() -> Path:
    return Path(str(resources.files("homeactivity") / "data" / "fusion_rules.csv"))


def load_default_rules() -> FusionRuleTable:
    return load_rules(default_rules_path())


def derive_sleep(
    timeline,
    min_still_ms: int = DEFAULT_MIN_STILL_MS,
    tick_ms: int = DEFAULT_TICK_MS,
):
    """Rewrite sustained stillness to Sleep.

    timeline is an ordered list of (ts, basic) pairs at tick_ms cadence.
    Every maximal run of Lie whose covered duration (last tick start to
    last tick end) reaches min_still_ms becomes Sleep for its whole
    duration; shorter runs are untouched.
    """
    timeline = list(timeline)
    out = list(timeline)
    i = 0
    while i < len(timeline):
        if timeline[i][1] != "Lie":
            i += 1
            continue
        j = i
        while j + 1 < len(timeline) and timeline[j + 1][1] == "Lie":
            j += 1
        duration = timeline[j][0] + tick_ms - timeline[i][0]
        if duration >= min_still_ms:
            for k in range(i, j + 1):
                out[k] = (timeline[k][0], "Sleep")
        i = j + 1
    return out


def flag_stream(derived_timeline, tick_ms: int = DEFAULT_TICK_MS):
    """Maximal non-Normal runs as (start_ts, end_ts, flag) report entries.

    derived_timeline is an ordered list of (ts, DerivedActivity). Adjacent
    ticks sharing a flag coalesce even when the activity name changes.
    """
    report = []
    run_start = None
    run_flag = None
    prev_ts = None
    for ts, derived in derived_timeline:
        flag = derived.flag
        if flag != run_flag:
            if run_flag is not None and run_flag != "Normal":
                report.append((run_start, prev_ts + tick_ms, run_flag))
            run_start, run_flag = ts, flag
        prev_ts = ts
    if run_flag is not None and run_flag != "Normal":
        report.append((run_start, prev_ts + tick_ms, run_flag))
    return report


def write_derived(path: str | Path, timeline) -> None:
    """Serialize an ordered (ts, DerivedActivity) timeline."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["ts", "derived_name", "flag"])
        for ts, derived in timeline:
            writer.writerow([ts, derived.name, derived.flag])


def read_derived(path: str | Path):
    out = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            out.append((int(row["ts"]), DerivedActivity(row["derived_name"], row["flag"])))
    return out
