"""Scripted color-mixing policies."""

from __future__ import annotations

import re
from typing import Sequence

from ..envs.color import BASE_COLORS, recipe

History = Sequence[tuple[str, str]]

_TASK_RE = re.compile(r"Create (\d+) ml of (\w+) paint in container (\w)")
_ADD_RE = re.compile(r"^add (\w+) to (\w)$", re.IGNORECASE)
_CHECK_RE = re.compile(r"Container (\w) has 1 ml of (\w+) paint\.")


def parse_task(description: str) -> tuple[int, str, str]:
    m = _TASK_RE.search(description)
    if not m:
        raise ValueError("no color task in description")
    return int(m.group(1)), m.group(2), m.group(3)


def learned_labels(history: History) -> dict[str, str]:
    """label -> true pigment, from a Clean / Add / Check sequence on one container."""
    found: dict[str, str] = {}
    for (a0, _), (a1, _), (a2, o2) in zip(history, history[1:], history[2:]):
        add = _ADD_RE.match(a1.strip())
        check = _CHECK_RE.match(o2)
        if a0.strip().lower().startswith("clean") and add and check and a2.strip().lower().startswith("check"):
            if add.group(2).upper() == check.group(1) == a0.strip()[-1].upper():
                found[add.group(1).lower()] = check.group(2)
    return found


def _fill(volume: int, color: str, container: str, label_for: dict[str, str]) -> list[str]:
    bases = recipe(color)
    actions = [f"Clean {container}"]
    for k in range(volume):
        actions.append(f"Add {label_for[bases[k % len(bases)]]} to {container}")
    return actions + [f"Check {container}"]


class ColorSeeker:
    """Test every tube in a clean container before mixing."""

    def seek(self, description: str, history: History) -> list[str]:
        known = learned_labels(history)
        actions: list[str] = []
        for label in BASE_COLORS:
            if label not in known:
                actions += ["Clean A", f"Add {label} to A", "Check A"]
        return actions

    def plan(self, description: str, history: History) -> list[str]:
        volume, color, container = parse_task(description)
        known = learned_labels(history)
        label_for = {pigment: label for label, pigment in known.items()}
        if any(b not in label_for for b in recipe(color)):
            return [f"Check {container}"]
        return _fill(volume, color, container, label_for)


class ColorNaive:
    """Trusts the labels and assumes the container starts clean."""

    def seek(self, description: str, history: History) -> list[str]:
        return []

    def plan(self, description: str, history: History) -> list[str]:
        volume, color, container = parse_task(description)
        actions = _fill(volume, color, container, {c: c for c in BASE_COLORS})
        return actions[1:] if not history else actions
