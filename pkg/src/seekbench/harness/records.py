"""Run records, success-rate tables and sweep curves."""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import threading
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Sequence

log = logging.getLogger(__name__)

ERRORED_FLAG_FRACTION = 0.5
AXES = ("steps", "attempts")


class FailureCategory(str, Enum):
    INFORMATION_SEEKING = "InformationSeeking"
    INFORMATION_EXTRACTION = "InformationExtraction"
    INSTRUCTION_UNDERSTANDING = "InstructionUnderstanding"
    LONG_HORIZON_PLANNING = "LongHorizonPlanning"


@dataclass
class RunRecord:
    id: str
    task: str
    method: str
    seed: int
    success: bool
    steps_used: int
    attempts_used: int
    budget: int
    max_attempts: int
    sweep: str | None = None
    errored: bool = False
    error: str | None = None
    deadline_hit: bool = False
    wall_ms: int = 0
    attempt_steps: list[list[int]] = field(default_factory=list)
    failure_category: str | None = None
    failure_note: str | None = None
    transcript: str | None = None
    log: str | None = None

    def __post_init__(self) -> None:
        if self.success and self.failure_category is not None:
            raise ValueError("successful runs carry no failure category")
        if self.steps_used > self.budget:
            raise ValueError(f"steps_used {self.steps_used} exceeds budget {self.budget}")

    @property
    def group(self) -> str:
        base = f"{self.task}|{self.method}"
        if self.sweep == "steps":
            return f"{base}|steps={self.budget}"
        if self.sweep == "attempts":
            return f"{base}|attempts={self.max_attempts}"
        return base

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RunRecord":
        return cls(**data)


class RecordWriter:
    """Appends records to ``records.jsonl`` one line at a time, fsync'd."""

    def __init__(self, path: Path) -> None:
        self.path = path
        self._lock = threading.Lock()

    def write(self, record: RunRecord) -> None:
        line = record.to_json() + "\n"
        with self._lock, open(self.path, "a", encoding="utf-8") as fh:
            fh.write(line)
            fh.flush()
            os.fsync(fh.fileno())


def load_records(path: str | Path) -> list[RunRecord]:
    path = Path(path)
    if path.is_dir():
        path = path / "records.jsonl"
    records = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        try:
            records.append(RunRecord.from_dict(json.loads(line)))
        except (ValueError, TypeError) as exc:
            # A torn final line after a crash is skipped.
            log.warning("skipping unreadable record line: %s", exc)
    return records


@dataclass(frozen=True)
class RateRow:
    group: str
    trials: int
    successes: int
    failures: int
    errored: int
    rate: float
    flagged: bool


def _key(record: RunRecord, group_keys: Sequence[str]) -> str:
    if not group_keys:
        return record.group
    return "|".join(str(getattr(record, k)) for k in group_keys)


def success_rate(records: Iterable[RunRecord], group_keys: Sequence[str] = ()) -> list[RateRow]:
    """Success percentage per group; errored trials leave the denominator."""
    groups: dict[str, list[RunRecord]] = {}
    for r in records:
        groups.setdefault(_key(r, group_keys), []).append(r)
    if not groups:
        raise ValueError("no records")
    rows = []
    for name in sorted(groups):
        rs = groups[name]
        errored = sum(r.errored for r in rs)
        valid = len(rs) - errored
        successes = sum(r.success for r in rs if not r.errored)
        flagged = errored >= ERRORED_FLAG_FRACTION * len(rs)
        if valid == 0:
            log.warning("group %s has no valid trials (%d errored); omitted", name, errored)
            continue
        rows.append(RateRow(name, len(rs), successes, valid - successes, errored,
                            round(100.0 * successes / valid, 4), flagged))
    return rows


@dataclass(frozen=True)
class CurvePoint:
    group: str
    axis: str
    budget: int
    rate: float


def curve(records: Iterable[RunRecord], axis: str, budgets: Sequence[int] | None = None) -> list[CurvePoint]:
    """Success rate at each sweep value, per task/method pair."""
    if axis not in AXES:
        raise ValueError(f"unknown axis {axis!r}; expected one of {AXES}")
    swept = [r for r in records if r.sweep == axis and not r.errored]
    value = (lambda r: r.budget) if axis == "steps" else (lambda r: r.max_attempts)
    wanted = sorted(set(budgets) if budgets is not None else {value(r) for r in swept})
    cells: dict[str, dict[int, list[bool]]] = {}
    for r in swept:
        cells.setdefault(f"{r.task}|{r.method}", {}).setdefault(value(r), []).append(r.success)
    points = []
    for group in sorted(cells):
        for b in wanted:
            outcomes = cells[group].get(b)
            if outcomes:
                points.append(CurvePoint(group, axis, b, round(100.0 * sum(outcomes) / len(outcomes), 4)))
    return points


def metrics_csv(rows: Sequence[RateRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["group", "trials", "successes", "rate", "failures", "errored", "flagged"])
    for r in rows:
        w.writerow([r.group, r.trials, r.successes, f"{r.rate:.1f}", r.failures, r.errored, int(r.flagged)])
    return buf.getvalue()


def curves_csv(points: Sequence[CurvePoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["axis", "budget", "rate", "group"])
    for p in points:
        w.writerow([p.axis, p.budget, f"{p.rate:.1f}", p.group])
    return buf.getvalue()


def write_reports(records: Sequence[RunRecord], out_dir: Path) -> tuple[Path, Path]:
    """Write metrics.csv and curves.csv (a pure function of the record set)."""
    rows = success_rate(records)
    points = [p for axis in AXES for p in curve(records, axis)]
    metrics, curves = out_dir / "metrics.csv", out_dir / "curves.csv"
    metrics.write_text(metrics_csv(rows), encoding="utf-8")
    curves.write_text(curves_csv(points), encoding="utf-8")
    return metrics, curves
