from __future__ import annotations

import json
from pathlib import Path

import pytest

from seekbench.agent.backends import ScriptedBackend
from seekbench.envs import Entry
from seekbench.harness import ConfigError, parse_config, run_experiment
from seekbench.harness.classify import classify_failure, rule_category
from seekbench.harness.records import (
    FailureCategory, RecordWriter, RunRecord, curve, load_records, metrics_csv, success_rate,
)
from seekbench.harness.runner import enumerate_trials


def cfg(tmp_path: Path, **overrides):
    data = {
        "tasks": [{"id": "arm/perturbed"}, {"id": "nav/*"}],
        "methods": [
            {"name": "seeker", "method": "infoseeker", "max_attempts": 3, "backend": {"kind": "policy"}},
            {"name": "naive", "method": "vanilla", "max_attempts": 1, "backend": {"kind": "policy", "policy": "naive"}},
        ],
        "trials_per_cell": 3,
        "output_dir": str(tmp_path / "out"),
    }
    data.update(overrides)
    return parse_config(data)


def rec(i: int, success: bool, errored: bool = False, **kw) -> RunRecord:
    base = dict(id=f"r{i}", task="arm/basic", method="m", seed=i, success=success, steps_used=1,
                attempts_used=1, budget=10, max_attempts=1, errored=errored)
    base.update(kw)
    return RunRecord(**base)


@pytest.mark.parametrize("bad,match", [
    ({"trials_per_cell": 0}, "trials_per_cell"),
    ({"workers": 0}, "workers"),
    ({"tasks": [{"id": "sky/*"}]}, "matches no task"),
    ({"tasks": []}, "at least one"),
    ({"methods": [{"method": "magic"}]}, "unknown method"),
    ({"methods": [{"backend": {"kind": "chat"}}]}, "base_url"),
    ({"methods": [{"backend": {"kind": "oracle"}}]}, "backend kind"),
    ({"methods": [{"colour": 1}]}, "unknown keys"),
    ({"bogus": 1}, "unknown top-level"),
    ({"budget_sweep": [10, 0]}, "positive"),
    ({"methods": [{"name": "a"}, {"name": "a"}]}, "unique"),
])
def test_config_rejections(tmp_path, bad, match):
    with pytest.raises(ConfigError, match=match):
        cfg(tmp_path, **bad)


def test_task_patterns_and_seeds(tmp_path):
    c = cfg(tmp_path)
    assert [t.task_id for t in c.tasks] == ["arm/perturbed", "nav/basic", "nav/perturbed"]
    assert len(parse_config({"tasks": [{"id": "*"}], "methods": [{}]}).tasks) == 11
    trials = list(enumerate_trials(c))
    assert len(trials) == 3 * 2 * 3
    assert [t.seed for t in trials[:3]] == [0, 1, 2]
    assert len({t.id for t in trials}) == len(trials)
    swept = list(enumerate_trials(cfg(tmp_path, budget_sweep=[5, 10], attempt_sweep=[1, 2], base_seed=7)))
    assert len(swept) == 3 * 2 * 4 * 3 and swept[0].seed == 7
    assert swept[0].id == "arm-perturbed__seeker__steps5__t0000"


def test_run_resume_and_determinism(tmp_path):
    c = cfg(tmp_path)
    first = run_experiment(c)
    out = Path(c.output_dir)
    metrics = (out / "metrics.csv").read_bytes()
    assert len(first) == 18 and all(not r.errored for r in first)
    by_group = {r.group: r for r in success_rate(first)}
    assert by_group["arm/perturbed|seeker"].rate == 100.0
    assert by_group["arm/perturbed|naive"].rate == 0.0
    assert by_group["nav/basic|naive"].rate == 100.0
    for r in first:
        assert (out / r.transcript).exists() and (out / r.log).exists()
        assert r.steps_used == sum(a + b for a, b in r.attempt_steps)
    # resume: nothing new runs, report unchanged
    lines = (out / "records.jsonl").read_text().splitlines()
    again = run_experiment(c)
    assert (out / "records.jsonl").read_text().splitlines() == lines
    assert [r.id for r in again] == [r.id for r in first]
    # a fresh rerun, in parallel, reproduces the report byte for byte
    other = cfg(tmp_path, workers=4)
    run_experiment(other, resume=False)
    assert (out / "metrics.csv").read_bytes() == metrics


def test_interrupted_run_resumes(tmp_path):
    c = cfg(tmp_path)
    out = Path(c.output_dir)
    full = run_experiment(c)
    path = out / "records.jsonl"
    lines = path.read_text().splitlines(keepends=True)
    path.write_text("".join(lines[:5]) + lines[5][:20])  # torn final line
    assert len(load_records(path)) == 5
    resumed = run_experiment(c)
    assert sorted(r.id for r in resumed) == sorted(r.id for r in full)
    assert [(r.id, r.success) for r in resumed] == [(r.id, r.success) for r in full]


def test_unreachable_backend_errors_are_excluded(tmp_path):
    c = cfg(tmp_path, tasks=[{"id": "arm/basic"}], trials_per_cell=2, methods=[
        {"name": "down", "backend": {"kind": "chat", "base_url": "http://127.0.0.1:9", "model": "x",
                                     "timeout": 0.5, "max_retries": 0}},
        {"name": "up"},
    ])
    records = run_experiment(c)
    down = [r for r in records if r.method == "down"]
    assert all(r.errored and r.error for r in down)
    rows = success_rate(records)
    assert [r.group for r in rows] == ["arm/basic|up"]


def test_success_rate_rules():
    rows = success_rate([rec(0, True), rec(1, False), rec(2, False, errored=True), rec(3, True)])
    (row,) = rows
    assert (row.trials, row.successes, row.failures, row.errored) == (4, 2, 1, 1)
    assert row.rate == pytest.approx(200 / 3, abs=1e-3) and not row.flagged
    (row,) = success_rate([rec(0, True), rec(1, False, errored=True)])
    assert row.flagged and row.rate == 100.0
    assert metrics_csv(rows).splitlines()[0] == "group,trials,successes,rate,failures,errored,flagged"
    with pytest.raises(ValueError):
        success_rate([])


def test_curve():
    records = [rec(i, i % 2 == 0 or b > 5, budget=b, steps_used=1, sweep="steps", id=f"{b}-{i}")
               for b in (5, 10) for i in range(4)]
    points = curve(records, "steps")
    assert [(p.budget, p.rate) for p in points] == [(5, 50.0), (10, 100.0)]
    assert curve(records, "attempts") == []
    with pytest.raises(ValueError):
        curve(records, "tokens")


def test_record_validation_and_writer(tmp_path):
    with pytest.raises(ValueError):
        rec(0, True, failure_category="LongHorizonPlanning")
    with pytest.raises(ValueError):
        rec(0, False, steps_used=11)
    w = RecordWriter(tmp_path / "r.jsonl")
    w.write(rec(0, True))
    (back,) = load_records(tmp_path / "r.jsonl")
    assert back == rec(0, True)
    assert json.loads(back.to_json())["id"] == "r0"


def test_failure_classification():
    seek = [Entry("Check", "x", "1:seek"), Entry("Move 1 2", "Failed!", "1:plan")]
    assert rule_category([Entry("Move 1 2", "Failed!", "1:plan")]) == FailureCategory.INFORMATION_SEEKING
    bad = seek + [Entry("fly", "Invalid action. Type 'Help' for available actions.", "1:plan")]
    assert rule_category(bad) == FailureCategory.INSTRUCTION_UNDERSTANDING
    assert rule_category(seek, ["offset 1 0"]) == FailureCategory.INFORMATION_EXTRACTION
    assert rule_category(seek, ["None"]) == FailureCategory.LONG_HORIZON_PLANNING
    r = rec(0, False)
    got = classify_failure(r, seek, "d", [], ScriptedBackend(['{"Category": "Long-Horizon Planning"}']))
    assert got == FailureCategory.LONG_HORIZON_PLANNING and r.failure_category == "LongHorizonPlanning"
    r = rec(1, False)
    assert classify_failure(r, seek, "d", [], ScriptedBackend(["no idea"])) is None
    assert r.failure_note == "unparseable category" and r.failure_category is None
    with pytest.raises(ValueError):
        classify_failure(rec(2, True), seek)
