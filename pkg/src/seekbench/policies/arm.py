"""Scripted arm policies: a waypoint planner plus probe-and-compensate seeking."""

from __future__ import annotations

import math
import re
from collections import deque
from functools import lru_cache
from typing import Sequence

from ..envs.arm import (
    ArmConfig,
    Obstacle,
    inverse_kinematics,
    path_collision_check,
    reachable,
    wrap_angle,
)

Point = tuple[float, float]
History = Sequence[tuple[str, str]]

_F = r"[-+]?\d+(?:\.\d+)?"
_TARGET_RE = re.compile(rf"move the gripper to \[({_F}), ({_F})\]")
_OBSTACLE_RE = re.compile(rf"\[({_F}), ({_F})\] radius ({_F})")
_MOVE_RE = re.compile(rf"^move\s+({_F})\s*[,\s]\s*({_F})$", re.IGNORECASE)
_CHECK_RE = re.compile(rf"'Joint 1': \[({_F}), ({_F})\] 'Gripper': \[({_F}), ({_F})\]")

# Probe commands issued as one batch followed by a single Check. From the
# rest pose at least one of them commits for any command offset in [-1, 1]^2
# on a 0.1 lattice around the ring obstacles of the default task.
PROBES: tuple[Point, ...] = (
    (1.9, 0.0), (2.7, 0.0), (2.4, -0.6), (2.4, 0.6),
    (1.9, -0.4), (1.9, 0.4), (1.6, -0.2), (2.3, 1.0),
)


def parse_task(description: str) -> tuple[Point, tuple[Obstacle, ...]]:
    m = _TARGET_RE.search(description)
    if not m:
        raise ValueError("no arm target in description")
    target = (float(m.group(1)), float(m.group(2)))
    tail = description[m.end():].split("\n", 1)[0]
    obstacles = tuple(
        Obstacle((float(a), float(b)), float(r)) for a, b, r in _OBSTACLE_RE.findall(tail)
    )
    return target, obstacles


def config_from_check(obs: str) -> tuple[ArmConfig, Point] | None:
    m = _CHECK_RE.search(obs)
    if not m:
        return None
    jx, jy, gx, gy = map(float, m.groups())
    t0 = math.atan2(jy, jx)
    t1 = wrap_angle(math.atan2(gy - jy, gx - jx) - t0)
    return ArmConfig(t0, t1), (gx, gy)


def last_config(history: History) -> ArmConfig | None:
    """Configuration from the most recent Check, if no move committed since."""
    for action, obs in reversed(history):
        parsed = config_from_check(obs)
        if parsed:
            return parsed[0]
        if _MOVE_RE.match(action.strip()) and obs.startswith("Success"):
            return None
    return None


def estimate_offset(history: History) -> Point | None:
    """Offset between commanded and observed gripper positions.

    Uses the latest committed move that is followed by a Check with no
    other committed move in between.
    """
    pending: Point | None = None
    found: Point | None = None
    for action, obs in history:
        m = _MOVE_RE.match(action.strip())
        if m and obs.startswith("Success"):
            pending = (float(m.group(1)), float(m.group(2)))
            continue
        parsed = config_from_check(obs)
        if parsed and pending is not None:
            g = parsed[1]
            found = (round(g[0] - pending[0], 2), round(g[1] - pending[1], 2))
            pending = None
    return found


def _waypoints(spacing: float, shift: float) -> list[Point]:
    n = int(round(3.0 / spacing)) + 1
    pts = []
    for i in range(-n, n + 1):
        for j in range(-n, n + 1):
            p = (round(i * spacing + shift, 6), round(j * spacing + shift, 6))
            if reachable(p) and 1.0 + 1e-6 < math.hypot(*p) < 3.0 - 1e-6:
                pts.append(p)
    pts.sort(key=lambda p: (math.hypot(*p), p))
    return pts


def _key(c: ArmConfig) -> tuple[float, float]:
    return (round(wrap_angle(c.theta0), 3), round(wrap_angle(c.theta1), 3))


@lru_cache(maxsize=4096)
def plan_path(
    start: ArmConfig, goal: Point, obstacles: tuple[Obstacle, ...], shift: float = 0.0, max_depth: int = 4
) -> tuple[Point, ...] | None:
    """Shortest sequence of workspace points (ending at ``goal``) reachable
    by collision-free joint-space moves, or None.

    Intermediate waypoints lie on a 0.5 grid displaced by ``shift``.
    """
    if not reachable(goal):
        return None
    grid = _waypoints(0.5, shift)
    frontier = deque([(start, ())])
    seen = {_key(start)}
    while frontier:
        config, path = frontier.popleft()
        end = inverse_kinematics(goal, config)
        if path_collision_check(config, end, obstacles):
            return path + (goal,)
        if len(path) + 1 >= max_depth:
            continue
        for w in grid:
            nxt = inverse_kinematics(w, config)
            k = _key(nxt)
            if k in seen:
                continue
            if path_collision_check(config, nxt, obstacles):
                seen.add(k)
                frontier.append((nxt, path + (w,)))
    return None


def _move(p: Point) -> str:
    return f"Move {p[0]:.2f} {p[1]:.2f}"


class ArmSeeker:
    """Probe with a safe move, read the true gripper position, then plan
    in executed coordinates and subtract the measured offset from every command."""

    def seek(self, description: str, history: History) -> list[str]:
        if estimate_offset(history) is not None:
            return ["Check"]
        return [_move(p) for p in PROBES] + ["Check"]

    def plan(self, description: str, history: History) -> list[str]:
        target, obstacles = parse_task(description)
        offset = estimate_offset(history)
        current = last_config(history)
        if offset is None or current is None:
            return ["Check"]
        path = plan_path(current, target, obstacles)
        if path is None:
            return ["Check"]
        return [_move((p[0] - offset[0], p[1] - offset[1])) for p in path] + ["Check"]


class ArmNaive:
    """Plans with nominal dynamics; replans from the last observed pose."""

    def seek(self, description: str, history: History) -> list[str]:
        return []

    def plan(self, description: str, history: History) -> list[str]:
        target, obstacles = parse_task(description)
        current = last_config(history) if history else ArmConfig()
        if current is None:
            return ["Check"]
        # Off-grid waypoints keep intermediate commands away from the target.
        path = plan_path(current, target, obstacles, shift=0.25)
        if path is None:
            return ["Check"]
        return [_move(p) for p in path] + ["Check"]
