"""Shared text-environment contract: task specs, transcripts and step accounting."""

from __future__ import annotations

import json
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping

INVALID_ACTION = "Invalid action. Type 'Help' for available actions."

# (family, variant, size) triples; size only applies to blocks.
TASKS: tuple[tuple[str, str, str | None], ...] = (
    ("arm", "basic", None),
    ("arm", "perturbed", None),
    ("color", "basic", None),
    ("color", "contaminated", None),
    ("color", "wronglabel", None),
    ("nav", "basic", None),
    ("nav", "perturbed", None),
    ("blocks", "basic", "multiple"),
    ("blocks", "perturbed", "multiple"),
    ("blocks", "basic", "single"),
    ("blocks", "perturbed", "single"),
)

_MAX_SEED = 2**64 - 1


class InvalidTaskError(ValueError):
    pass


class EpisodeDoneError(RuntimeError):
    """Raised when stepping an episode that has already terminated."""


@dataclass(frozen=True)
class TaskSpec:
    family: str
    variant: str = "basic"
    seed: int = 0
    step_budget: int = 100
    size: str | None = None
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if (self.family, self.variant, self.size) not in TASKS:
            pair = f"({self.family!r}, {self.variant!r}"
            pair += f", size={self.size!r})" if self.size is not None or self.family == "blocks" else ")"
            raise InvalidTaskError(f"invalid task combination {pair}")
        if not 0 <= int(self.seed) <= _MAX_SEED:
            raise InvalidTaskError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.step_budget < 1:
            raise InvalidTaskError(f"step_budget must be >= 1, got {self.step_budget}")

    @property
    def task_id(self) -> str:
        family = f"{self.family}_{self.size}" if self.size else self.family
        return f"{family}/{self.variant}"

    def with_budget(self, step_budget: int) -> "TaskSpec":
        return TaskSpec(self.family, self.variant, self.seed, step_budget, self.size, dict(self.params))

    def with_seed(self, seed: int) -> "TaskSpec":
        return TaskSpec(self.family, self.variant, seed, self.step_budget, self.size, dict(self.params))


def all_task_specs(seed: int = 0, step_budget: int = 100) -> list[TaskSpec]:
    return [TaskSpec(f, v, seed, step_budget, s) for f, v, s in TASKS]


def parse_task_id(task_id: str) -> tuple[str, str, str | None]:
    """Inverse of ``TaskSpec.task_id``: ``"blocks_single/perturbed"`` -> ``("blocks", "perturbed", "single")``."""
    family, _, variant = task_id.partition("/")
    size = None
    if family.startswith("blocks_"):
        family, size = "blocks", family.split("_", 1)[1]
    return family, variant, size


@dataclass(frozen=True)
class Entry:
    action: str
    observation: str
    tag: str | None = None


@dataclass(frozen=True)
class StepOutcome:
    observation: str
    done: bool
    success: bool
    budget_exhausted: bool


class Transcript:
    """Append-only action/observation log with history markers.

    Markers split the log for the agent layer without touching the
    environment state or the step count.
    """

    def __init__(self) -> None:
        self.entries: list[Entry] = []
        self._markers: list[int] = []

    @property
    def steps_used(self) -> int:
        return len(self.entries)

    def append(self, entry: Entry) -> None:
        self.entries.append(entry)

    def mark(self) -> None:
        self._markers.append(len(self.entries))

    @property
    def markers(self) -> tuple[int, ...]:
        return tuple(self._markers)

    def since_marker(self) -> list[Entry]:
        start = self._markers[-1] if self._markers else 0
        return self.entries[start:]

    def to_records(self) -> list[dict[str, Any]]:
        marked = set(self._markers)
        records = []
        for i, e in enumerate(self.entries):
            rec: dict[str, Any] = {"i": i, "a": e.action, "o": e.observation, "marker": i in marked}
            if e.tag is not None:
                rec["tag"] = e.tag
            records.append(rec)
        return records

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in self.to_records())

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_jsonl(), encoding="utf-8")

    @classmethod
    def from_records(cls, records: Iterable[Mapping[str, Any]]) -> "Transcript":
        t = cls()
        for rec in records:
            if rec.get("marker"):
                t.mark()
            t.append(Entry(rec["a"], rec["o"], rec.get("tag")))
        return t

    @classmethod
    def load(cls, path: str | Path) -> "Transcript":
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        return cls.from_records(json.loads(line) for line in lines if line.strip())


def check_action_text(action: str) -> str:
    if "\n" in action or "\r" in action:
        raise ValueError(f"action must be a single line: {action!r}")
    text = action.strip()
    if not text:
        raise ValueError("action must be non-empty")
    return text


class Environment(ABC):
    """Base class for all task families.

    Subclasses implement ``_execute`` (return an observation, or ``None`` for
    an unparseable command), ``_is_success``, ``describe`` and ``help_text``.
    """

    family: str = ""

    def __init__(self, spec: TaskSpec) -> None:
        self.spec = spec
        self.transcript = Transcript()
        self._success = False

    # -- contract -------------------------------------------------------
    @abstractmethod
    def describe(self) -> str: ...

    @abstractmethod
    def help_text(self) -> str: ...

    @abstractmethod
    def observable_state(self) -> str:
        """What an agent may see before acting; never reveals hidden dynamics."""

    @abstractmethod
    def _execute(self, command: str) -> str | None: ...

    @abstractmethod
    def _is_success(self) -> bool: ...

    # -- step accounting -------------------------------------------------
    @property
    def steps_used(self) -> int:
        return self.transcript.steps_used

    @property
    def success(self) -> bool:
        return self._success

    @property
    def budget_exhausted(self) -> bool:
        return self.steps_used >= self.spec.step_budget

    @property
    def done(self) -> bool:
        return self._success or self.budget_exhausted

    def step(self, action: str, tag: str | None = None) -> StepOutcome:
        if self.done:
            raise EpisodeDoneError(f"episode finished after {self.steps_used} steps")
        command = check_action_text(action)
        if command.lower() == "help":
            obs = self.help_text()
        else:
            obs = self._execute(command)
            if obs is None:
                obs = INVALID_ACTION
        self.transcript.append(Entry(command, obs, tag))
        if self._is_success():
            self._success = True
        return StepOutcome(obs, self.done, self._success, self.budget_exhausted and not self._success)

    def mark_history(self) -> None:
        self.transcript.mark()

    def history_since_marker(self) -> list[Entry]:
        return self.transcript.since_marker()
