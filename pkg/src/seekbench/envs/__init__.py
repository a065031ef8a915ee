"""Text environments for the arm, navigation, color mixing and block stacking tasks."""

from __future__ import annotations

from .arm import ArmEnv
from .blocks import BlocksEnv
from .color import ColorEnv
from .core import (
    INVALID_ACTION,
    TASKS,
    Entry,
    Environment,
    EpisodeDoneError,
    InvalidTaskError,
    StepOutcome,
    TaskSpec,
    Transcript,
    all_task_specs,
    parse_task_id,
)
from .nav import NavEnv

_FAMILIES: dict[str, type[Environment]] = {"arm": ArmEnv, "nav": NavEnv, "color": ColorEnv, "blocks": BlocksEnv}


def make_env(spec: TaskSpec) -> Environment:
    return _FAMILIES[spec.family](spec)


__all__ = [
    "INVALID_ACTION", "TASKS", "ArmEnv", "BlocksEnv", "ColorEnv", "Entry", "Environment",
    "EpisodeDoneError", "InvalidTaskError", "NavEnv", "StepOutcome", "TaskSpec", "Transcript",
    "all_task_specs", "make_env", "parse_task_id",
]
