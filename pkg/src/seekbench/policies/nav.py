"""Scripted navigation policies."""

from __future__ import annotations

import re
from typing import Sequence

History = Sequence[tuple[str, str]]
Cell = tuple[int, int]

NOMINAL: dict[str, Cell] = {"Forward": (0, 1), "Backward": (0, -1), "Left": (-1, 0), "Right": (1, 0)}
_CELL = r"\((-?\d+), (-?\d+)\)"
_START_RE = re.compile(rf"starts at {_CELL}")
_BALL_RE = re.compile(rf"ball at {_CELL}")
_GOAL_RE = re.compile(rf"goal location {_CELL}")
_POS_RE = re.compile(rf"(?:Current position: |Robot at ){_CELL}")


def _cell(m: re.Match) -> Cell:
    return int(m.group(1)), int(m.group(2))


def parse_task(description: str) -> tuple[Cell, Cell, Cell]:
    return tuple(_cell(r.search(description)) for r in (_START_RE, _BALL_RE, _GOAL_RE))  # type: ignore[return-value]


def track(description: str, history: History) -> tuple[Cell | None, bool, dict[str, Cell]]:
    """Last known position, whether the ball is held, and observed displacements."""
    start, _, _ = parse_task(description)
    pos: Cell | None = start if not history else None
    held = False
    learned: dict[str, Cell] = {}
    for action, obs in history:
        m = _POS_RE.search(obs)
        if not m:
            if obs == "You picked up the ball.":
                held = True
            continue
        new = _cell(m)
        name = action.strip().capitalize()
        if obs.startswith("You moved") and pos is not None and name in NOMINAL:
            d = (new[0] - pos[0], new[1] - pos[1])
            learned[name] = d
            # Opposite commands are assumed to have opposite effects.
            opposite = {"Forward": "Backward", "Backward": "Forward", "Left": "Right", "Right": "Left"}[name]
            learned.setdefault(opposite, (-d[0], -d[1]))
        pos = new
        if "Ball: held" in obs:
            held = True
    return pos, held, learned


def route(src: Cell, dst: Cell, mapping: dict[str, Cell]) -> list[str]:
    actions = []
    for axis in (0, 1):
        delta = dst[axis] - src[axis]
        if delta == 0:
            continue
        step = 1 if delta > 0 else -1
        name = next(n for n, d in sorted(mapping.items()) if d[axis] == step and d[1 - axis] == 0)
        actions += [name] * abs(delta)
    return actions


def _deliver(description: str, pos: Cell, held: bool, mapping: dict[str, Cell]) -> list[str]:
    _, ball, goal = parse_task(description)
    actions: list[str] = []
    if not held:
        actions += route(pos, ball, mapping) + ["Pick"]
        pos = ball
    return actions + route(pos, goal, mapping) + ["Check"]


class NavSeeker:
    """Probe one move per axis toward the ball, learn the real mapping, then route."""

    def seek(self, description: str, history: History) -> list[str]:
        pos, held, learned = track(description, history)
        # Anchor the position so later displacements can be measured from the history.
        actions = ["Check"]
        _, ball, goal = parse_task(description)
        here = pos or (0, 0)
        dest = goal if held else ball
        for axis, (pos_name, neg_name) in enumerate((("Right", "Left"), ("Forward", "Backward"))):
            if pos_name in learned:
                continue
            toward = neg_name if dest[axis] < here[axis] else pos_name
            actions.append(toward)
        return actions

    def plan(self, description: str, history: History) -> list[str]:
        pos, held, learned = track(description, history)
        if pos is None or len(learned) < 4:
            return ["Check"]
        return _deliver(description, pos, held, learned)


class NavNaive:
    def seek(self, description: str, history: History) -> list[str]:
        return []

    def plan(self, description: str, history: History) -> list[str]:
        pos, held, _ = track(description, history)
        if pos is None:
            return ["Check"]
        return _deliver(description, pos, held, NOMINAL)
