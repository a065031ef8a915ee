"""Seeded trial execution with crash-safe persistence."""

from __future__ import annotations

import json
import logging
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Iterator

from ..agent.backends import Backend, ChatCompletionsBackend, PolicyBackend
from ..agent.loop import AgentRun, run_agent
from ..envs import make_env
from ..policies import make_policy
from .classify import classify_failure
from .config import ExperimentConfig, MethodEntry, TaskEntry
from .records import RecordWriter, RunRecord, load_records, write_reports

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Trial:
    task: TaskEntry
    method: MethodEntry
    trial_index: int
    seed: int
    budget: int
    max_attempts: int
    sweep: str | None

    @property
    def id(self) -> str:
        raw = f"{self.task.task_id}__{self.method.name}"
        if self.sweep == "steps":
            raw += f"__steps{self.budget}"
        elif self.sweep == "attempts":
            raw += f"__attempts{self.max_attempts}"
        raw += f"__t{self.trial_index:04d}"
        return re.sub(r"[^A-Za-z0-9_.-]+", "-", raw)


def enumerate_trials(config: ExperimentConfig) -> Iterator[Trial]:
    """Every task x method x sweep value x trial, in a fixed order."""
    for task in config.tasks:
        for method in config.methods:
            settings: list[tuple[int, int, str | None]] = []
            if config.budget_sweep:
                settings += [(b, method.agent.max_attempts, "steps") for b in config.budget_sweep]
            if config.attempt_sweep:
                settings += [(task.step_budget, n, "attempts") for n in config.attempt_sweep]
            if not settings:
                settings = [(task.step_budget, method.agent.max_attempts, None)]
            for budget, attempts, sweep in settings:
                for t in range(config.trials_per_cell):
                    yield Trial(task, method, t, config.base_seed + t, budget, attempts, sweep)


def make_backend(method: MethodEntry, family: str) -> Backend:
    spec = dict(method.backend)
    kind = spec.pop("kind")
    if kind == "policy":
        return PolicyBackend(make_policy(family, spec.get("policy", "seeker")))
    return ChatCompletionsBackend(
        base_url=spec["base_url"],
        model=spec["model"],
        api_key_env=spec.get("api_key_env", "OPENAI_API_KEY"),
        timeout=float(spec.get("timeout", 60.0)),
        max_retries=int(spec.get("max_retries", 2)),
        params=spec.get("params"),
    )


def _write_jsonl(path: Path, rows: list[dict[str, Any]]) -> None:
    path.write_text("".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows), encoding="utf-8")


def run_trial(trial: Trial, out_dir: Path, classify: bool = False) -> RunRecord:
    spec = trial.task.spec(trial.seed, trial.budget)
    env = make_env(spec)
    backend = make_backend(trial.method, spec.family)
    agent_cfg = replace(trial.method.agent, step_budget=trial.budget, max_attempts=trial.max_attempts)
    start = time.perf_counter()
    run: AgentRun = run_agent(env, backend, agent_cfg)
    wall_ms = int((time.perf_counter() - start) * 1000)

    transcript_path = out_dir / "transcripts" / f"{trial.id}.jsonl"
    log_path = out_dir / "logs" / f"{trial.id}.jsonl"
    env.transcript.save(transcript_path)
    _write_jsonl(log_path, [
        {"attempt": x.attempt, "phase": x.phase, "messages": x.messages, "response": x.response}
        for x in run.exchanges
    ])
    record = RunRecord(
        id=trial.id,
        task=spec.task_id,
        method=trial.method.name,
        seed=trial.seed,
        success=run.success,
        steps_used=run.steps_used,
        attempts_used=run.attempts_used,
        budget=trial.budget,
        max_attempts=trial.max_attempts,
        sweep=trial.sweep,
        errored=run.errored,
        error=run.error,
        deadline_hit=run.deadline_hit,
        wall_ms=wall_ms,
        attempt_steps=[[a.seek_steps, a.plan_steps] for a in run.attempts],
        transcript=str(transcript_path.relative_to(out_dir)),
        log=str(log_path.relative_to(out_dir)),
    )
    if classify and not run.success and not run.errored:
        classifier = backend if isinstance(backend, ChatCompletionsBackend) else None
        classify_failure(record, env.transcript.entries, env.describe(),
                         [a.information for a in run.attempts], classifier)
    if isinstance(backend, ChatCompletionsBackend):
        backend.close()
    return record


def run_experiment(config: ExperimentConfig, resume: bool = True) -> list[RunRecord]:
    """Run every trial, appending each record to records.jsonl as it finishes.

    With ``resume``, trials already present in records.jsonl are skipped,
    so an interrupted run loses at most the trials that were in flight.
    """
    out = Path(config.output_dir)
    (out / "transcripts").mkdir(parents=True, exist_ok=True)
    (out / "logs").mkdir(parents=True, exist_ok=True)
    records_path = out / "records.jsonl"
    done: dict[str, RunRecord] = {}
    if resume and records_path.exists():
        done = {r.id: r for r in load_records(records_path)}
    elif records_path.exists():
        records_path.unlink()
    writer = RecordWriter(records_path)
    pending = [t for t in enumerate_trials(config) if t.id not in done]
    log.info("%d trials to run (%d already recorded)", len(pending), len(done))

    def work(trial: Trial) -> RunRecord:
        record = run_trial(trial, out, config.classify_failures)
        writer.write(record)
        return record

    if config.workers == 1:
        fresh = [work(t) for t in pending]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            fresh = list(pool.map(work, pending))
    order = {t.id: i for i, t in enumerate(enumerate_trials(config))}
    records = sorted([*done.values(), *fresh], key=lambda r: order.get(r.id, len(order)))
    if records:
        write_reports(records, out)
    return records
