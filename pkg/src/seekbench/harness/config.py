"""Experiment configuration files (TOML)."""

from __future__ import annotations

import fnmatch
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from ..agent.loop import AgentConfig
from ..envs.core import TASKS, TaskSpec, parse_task_id

TASK_IDS = tuple(TaskSpec(f, v, 0, 100, s).task_id for f, v, s in TASKS)
BACKEND_KINDS = ("policy", "chat")
_AGENT_KEYS = {"method", "max_attempts", "seek_enabled", "extract_enabled", "trace_window", "uncertainty_prompt", "deadline_s"}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class TaskEntry:
    task_id: str
    step_budget: int = 100
    params: Mapping[str, Any] = field(default_factory=dict)

    def spec(self, seed: int, step_budget: int | None = None) -> TaskSpec:
        family, variant, size = parse_task_id(self.task_id)
        return TaskSpec(family, variant, seed, step_budget or self.step_budget, size, dict(self.params))


@dataclass(frozen=True)
class MethodEntry:
    name: str
    agent: AgentConfig
    backend: Mapping[str, Any]


@dataclass(frozen=True)
class ExperimentConfig:
    tasks: tuple[TaskEntry, ...]
    methods: tuple[MethodEntry, ...]
    trials_per_cell: int = 50
    base_seed: int = 0
    budget_sweep: tuple[int, ...] | None = None
    attempt_sweep: tuple[int, ...] | None = None
    output_dir: Path = Path("results")
    workers: int = 1
    classify_failures: bool = False


def _expand(pattern: str) -> list[str]:
    matches = [t for t in TASK_IDS if fnmatch.fnmatchcase(t, pattern)]
    if not matches:
        raise ConfigError(f"task pattern {pattern!r} matches no task; known ids: {', '.join(TASK_IDS)}")
    return matches


def _positive_ints(raw: Any, name: str) -> tuple[int, ...] | None:
    if raw is None:
        return None
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"{name} must be a non-empty list")
    if not all(isinstance(v, int) and not isinstance(v, bool) and v >= 1 for v in raw):
        raise ConfigError(f"{name} entries must be positive integers")
    return tuple(raw)


def _method(raw: Mapping[str, Any], i: int) -> MethodEntry:
    if not isinstance(raw, Mapping):
        raise ConfigError(f"methods[{i}] must be a table")
    unknown = set(raw) - _AGENT_KEYS - {"name", "backend"}
    if unknown:
        raise ConfigError(f"methods[{i}]: unknown keys {sorted(unknown)}")
    kw = {k: raw[k] for k in _AGENT_KEYS if k in raw}
    method = kw.get("method", "infoseeker")
    if method == "vanilla":
        kw.setdefault("seek_enabled", False)
        kw.setdefault("extract_enabled", False)
    try:
        agent = AgentConfig(**kw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"methods[{i}]: {exc}") from exc
    backend = dict(raw.get("backend", {"kind": "policy"}))
    kind = backend.get("kind")
    if kind not in BACKEND_KINDS:
        raise ConfigError(f"methods[{i}]: backend kind must be one of {BACKEND_KINDS}, got {kind!r}")
    if kind == "policy" and backend.get("policy", "seeker") not in ("seeker", "naive"):
        raise ConfigError(f"methods[{i}]: policy must be 'seeker' or 'naive'")
    if kind == "chat" and not {"base_url", "model"} <= set(backend):
        raise ConfigError(f"methods[{i}]: chat backend needs base_url and model")
    name = raw.get("name", method)
    if not isinstance(name, str) or not name or "|" in name:
        raise ConfigError(f"methods[{i}]: name must be a non-empty string without '|'")
    return MethodEntry(name, agent, backend)


def parse_config(data: Mapping[str, Any], base_dir: Path | None = None) -> ExperimentConfig:
    known = {"tasks", "methods", "trials_per_cell", "base_seed", "budget_sweep", "attempt_sweep",
             "output_dir", "workers", "classify_failures"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown top-level keys {sorted(unknown)}")
    raw_tasks = data.get("tasks")
    if not isinstance(raw_tasks, list) or not raw_tasks:
        raise ConfigError("config needs at least one [[tasks]] entry")
    tasks: list[TaskEntry] = []
    for i, t in enumerate(raw_tasks):
        if not isinstance(t, Mapping) or "id" not in t:
            raise ConfigError(f"tasks[{i}] needs an 'id'")
        budget = t.get("step_budget", 100)
        if not isinstance(budget, int) or budget < 1:
            raise ConfigError(f"tasks[{i}]: step_budget must be a positive integer")
        for task_id in _expand(str(t["id"])):
            entry = TaskEntry(task_id, budget, dict(t.get("params", {})))
            try:
                entry.spec(0)
            except (ValueError, TypeError, KeyError) as exc:
                raise ConfigError(f"tasks[{i}] ({task_id}): {exc}") from exc
            tasks.append(entry)
    raw_methods = data.get("methods")
    if not isinstance(raw_methods, list) or not raw_methods:
        raise ConfigError("config needs at least one [[methods]] entry")
    methods = tuple(_method(m, i) for i, m in enumerate(raw_methods))
    names = [m.name for m in methods]
    if len(set(names)) != len(names):
        raise ConfigError("method names must be unique")
    trials = data.get("trials_per_cell", 50)
    if not isinstance(trials, int) or trials < 1:
        raise ConfigError("trials_per_cell must be >= 1")
    base_seed = data.get("base_seed", 0)
    if not isinstance(base_seed, int) or base_seed < 0:
        raise ConfigError("base_seed must be a non-negative integer")
    workers = data.get("workers", 1)
    if not isinstance(workers, int) or workers < 1:
        raise ConfigError("workers must be >= 1")
    out = Path(data.get("output_dir", "results"))
    if base_dir is not None and not out.is_absolute():
        out = base_dir / out
    return ExperimentConfig(
        tasks=tuple(tasks),
        methods=methods,
        trials_per_cell=trials,
        base_seed=base_seed,
        budget_sweep=_positive_ints(data.get("budget_sweep"), "budget_sweep"),
        attempt_sweep=_positive_ints(data.get("attempt_sweep"), "attempt_sweep"),
        output_dir=out,
        workers=workers,
        classify_failures=bool(data.get("classify_failures", False)),
    )


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        data = tomllib.loads(path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return parse_config(data, base_dir=path.parent)
