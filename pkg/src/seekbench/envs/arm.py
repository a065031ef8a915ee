"""Planar two-link arm with circular obstacles and an optional command offset."""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import Environment, TaskSpec

L1 = 2.0
L2 = 1.0
REACH_MIN = abs(L1 - L2)
REACH_MAX = L1 + L2
REACH_TOLERANCE = 0.05
PATH_STEPS = 64
_REACH_EPS = 1e-12
_TIE_EPS = 1e-9

Point = tuple[float, float]

OUT_OF_REACH = "Failed! Target is out of reach. Move aborted."
COLLISION = "Failed! Collision detected along the path. Move aborted."
MOVE_OK = "Success!"

HELP = (
    "1) Move x y: Move the gripper to (x, y). The rotation of the joints will be calculated by inverse kinematics\n"
    "2) Check: Check Robot arm joint positions\n"
    "3) Help: View the available action options."
)

OFFSET_CHOICES = (-1.0, -0.5, -0.1, 0.1, 0.5, 1.0)


@dataclass(frozen=True)
class Obstacle:
    center: Point
    radius: float

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise ValueError(f"obstacle radius must be positive, got {self.radius}")


# Ten-obstacle ring used throughout the arm task listings.
DEFAULT_OBSTACLES = tuple(
    Obstacle(c, 0.5)
    for c in [
        (0.0, 3.0), (2.0, 2.0), (-2.0, 2.0), (2.5, 1.0), (-2.5, 1.0),
        (0.0, -3.0), (2.0, -2.0), (-2.0, -2.0), (2.5, -1.0), (-2.5, -1.0),
    ]
)
DEFAULT_TARGET = (1.0, 2.0)


class Unreachable(ValueError):
    def __init__(self, distance: float) -> None:
        self.distance = distance
        self.bounds = (REACH_MIN, REACH_MAX)
        super().__init__(f"target at distance {distance:.6g} is outside the reach annulus [{REACH_MIN}, {REACH_MAX}]")


@dataclass(frozen=True)
class ArmConfig:
    theta0: float = 0.0
    theta1: float = 0.0

    @property
    def joint1(self) -> Point:
        return forward_kinematics(self.theta0, self.theta1)[0]

    @property
    def gripper(self) -> Point:
        return forward_kinematics(self.theta0, self.theta1)[1]


def forward_kinematics(theta0: float, theta1: float) -> tuple[Point, Point]:
    j1 = (L1 * math.cos(theta0), L1 * math.sin(theta0))
    g = (j1[0] + L2 * math.cos(theta0 + theta1), j1[1] + L2 * math.sin(theta0 + theta1))
    return j1, g


def wrap_angle(a: float) -> float:
    """Map an angle to [-pi, pi)."""
    return (a + math.pi) % (2 * math.pi) - math.pi


def reachable(target: Point) -> bool:
    r = math.hypot(*target)
    return REACH_MIN - _REACH_EPS <= r <= REACH_MAX + _REACH_EPS


def ik_solutions(target: Point) -> list[ArmConfig]:
    """Both elbow branches for ``target``; the theta1 >= 0 branch comes first."""
    x, y = target
    r = math.hypot(x, y)
    if not reachable(target):
        raise Unreachable(r)
    c = (x * x + y * y - L1 * L1 - L2 * L2) / (2 * L1 * L2)
    c = min(1.0, max(-1.0, c))
    sols = []
    for sign in (1.0, -1.0):
        t1 = sign * math.acos(c)
        t0 = math.atan2(y, x) - math.atan2(L2 * math.sin(t1), L1 + L2 * math.cos(t1))
        sols.append(ArmConfig(t0, t1))
    return sols


def inverse_kinematics(target: Point, current: ArmConfig = ArmConfig()) -> ArmConfig:
    """Closest IK branch to ``current`` in joint space.

    Ties go to the theta1 >= 0 branch, which puts the elbow clockwise of the
    base-to-target line (the (1.75, -0.97) pose when reaching (2, 0) from rest).
    """
    sols = ik_solutions(target)

    def cost(s: ArmConfig) -> float:
        return abs(wrap_angle(s.theta0 - current.theta0)) + abs(wrap_angle(s.theta1 - current.theta1))

    up, down = sols
    return down if cost(down) < cost(up) - _TIE_EPS else up


def segment_circle_min_distance(p: Point, q: Point, obstacle: Obstacle) -> float:
    """Euclidean distance from segment pq to the obstacle center."""
    px, py = p
    dx, dy = q[0] - px, q[1] - py
    cx, cy = obstacle.center
    denom = dx * dx + dy * dy
    t = 0.0 if denom == 0 else min(1.0, max(0.0, ((cx - px) * dx + (cy - py) * dy) / denom))
    return math.hypot(px + t * dx - cx, py + t * dy - cy)


def _segment_distances(p: np.ndarray, q: np.ndarray, centers: np.ndarray) -> np.ndarray:
    # p, q: (n, 2); centers: (m, 2) -> (n, m)
    dx, dy = (q - p).T
    denom = dx * dx + dy * dy
    safe = np.where(denom > 0, denom, 1.0)[:, None]
    rx = centers[None, :, 0] - p[:, 0, None]
    ry = centers[None, :, 1] - p[:, 1, None]
    t = np.clip((rx * dx[:, None] + ry * dy[:, None]) / safe, 0.0, 1.0)
    t[denom == 0] = 0.0
    return np.hypot(t * dx[:, None] - rx, t * dy[:, None] - ry)


@lru_cache(maxsize=8)
def _fractions(steps: int) -> np.ndarray:
    return np.linspace(0.0, 1.0, steps + 1)


@lru_cache(maxsize=256)
def _obstacle_arrays(obstacles: tuple[Obstacle, ...]) -> tuple[np.ndarray, np.ndarray]:
    centers = np.array([o.center for o in obstacles], dtype=float)
    radii = np.array([o.radius for o in obstacles], dtype=float)
    return centers, radii


def interpolate(start: ArmConfig, end: ArmConfig, steps: int = PATH_STEPS) -> np.ndarray:
    """Joint-space samples (steps + 1, 2) along the shortest angular direction."""
    s = _fractions(steps)
    d0 = wrap_angle(end.theta0 - start.theta0)
    d1 = wrap_angle(end.theta1 - start.theta1)
    return np.stack([start.theta0 + s * d0, start.theta1 + s * d1], axis=1)


def path_collision_check(start: ArmConfig, end: ArmConfig, obstacles) -> bool:
    """True when the interpolated path is clear at every sample."""
    obstacles = tuple(obstacles)
    if not obstacles:
        return True
    th = interpolate(start, end)
    j1 = L1 * np.stack([np.cos(th[:, 0]), np.sin(th[:, 0])], axis=1)
    g = j1 + L2 * np.stack([np.cos(th[:, 0] + th[:, 1]), np.sin(th[:, 0] + th[:, 1])], axis=1)
    centers, radii = _obstacle_arrays(obstacles)
    # both links in one batch: base->joint1 then joint1->gripper
    d = _segment_distances(np.concatenate([np.zeros_like(j1), j1]), np.concatenate([j1, g]), centers)
    return bool(np.all(d >= radii))


def _fmt(v: float) -> str:
    return f"{round(v, 2) + 0.0:.2f}"


def format_joint_positions(config: ArmConfig) -> str:
    j1, g = forward_kinematics(config.theta0, config.theta1)
    return (
        f"Joint positions: 'Joint 0': [0.00, 0.00] "
        f"'Joint 1': [{_fmt(j1[0])}, {_fmt(j1[1])}] "
        f"'Gripper': [{_fmt(g[0])}, {_fmt(g[1])}]"
    )


_FLOAT = r"[-+]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?"
_MOVE_RE = re.compile(rf"^move\s+({_FLOAT})\s*[,\s]\s*({_FLOAT})$", re.IGNORECASE)


def _point_text(p: Point) -> str:
    return f"[{p[0]:.1f}, {p[1]:.1f}]"


class ArmEnv(Environment):
    """Move the gripper to a target while avoiding obstacles.

    Perturbed variants add a hidden constant offset to every commanded
    target before inverse kinematics.
    """

    family = "arm"

    def __init__(self, spec: TaskSpec) -> None:
        super().__init__(spec)
        p = spec.params
        rng = random.Random(spec.seed)
        self.target: Point = tuple(map(float, p.get("target", DEFAULT_TARGET)))
        obstacles = p.get("obstacles")
        if obstacles is None:
            self.obstacles = DEFAULT_OBSTACLES
        else:
            self.obstacles = tuple(o if isinstance(o, Obstacle) else Obstacle(tuple(o[0]), float(o[1])) for o in obstacles)
        if spec.variant == "perturbed":
            if "offset" in p:
                self.offset = tuple(map(float, p["offset"]))
            else:
                self.offset = (rng.choice(OFFSET_CHOICES), rng.choice(OFFSET_CHOICES))
        else:
            if tuple(p.get("offset", (0.0, 0.0))) != (0.0, 0.0):
                raise ValueError("basic arm tasks have no offset")
            self.offset = (0.0, 0.0)
            if not reachable(self.target):
                raise ValueError(f"target {self.target} is not reachable")
        self.config = ArmConfig()
        self._reached = False

    def describe(self) -> str:
        obstacles = ", ".join(f"{_point_text(o.center)} radius {o.radius:.1f}" for o in self.obstacles)
        goal = f"move the gripper to {_point_text(self.target)}"
        if obstacles:
            goal += f", while avoid collision with the obstacles at, {obstacles}"
        return (
            "The tabletop environment has a robot arm, several obstacles and a goal location.\n"
            f"The robot arm has two joints and a gripper, the goal is to  {goal} .\n\n"
            "The robot arm has the following primitive actions:\n" + HELP
        )

    def help_text(self) -> str:
        return HELP

    def observable_state(self) -> str:
        return format_joint_positions(self.config)

    def check(self) -> str:
        return format_joint_positions(self.config)

    def apply_move(self, x: float, y: float) -> str:
        executed = (x + self.offset[0], y + self.offset[1])
        if not reachable(executed):
            return OUT_OF_REACH
        new = inverse_kinematics(executed, self.config)
        if not path_collision_check(self.config, new, self.obstacles):
            return COLLISION
        self.config = new
        g = new.gripper
        self._reached = math.hypot(g[0] - self.target[0], g[1] - self.target[1]) <= REACH_TOLERANCE
        return MOVE_OK

    def _execute(self, command: str) -> str | None:
        low = command.lower()
        if low == "check":
            return self.check()
        m = _MOVE_RE.match(command)
        if m:
            x, y = float(m.group(1)), float(m.group(2))
            if not (math.isfinite(x) and math.isfinite(y)):
                return None
            return self.apply_move(x, y)
        return None

    def _is_success(self) -> bool:
        return self._reached
