"""Grid navigation: fetch a ball and carry it to a goal cell."""

from __future__ import annotations

import random

from .core import Environment, TaskSpec

Cell = tuple[int, int]

BOUND = 4
DIRECTIONS = ("forward", "backward", "left", "right")
BASIC_MAP: dict[str, Cell] = {"forward": (0, 1), "backward": (0, -1), "left": (-1, 0), "right": (1, 0)}

HELP = (
    "1) Forward: Move the robot forward by one cell (+y).\n"
    "2) Backward: Move the robot backward by one cell (-y).\n"
    "3) Left: Move the robot left by one cell (-x).\n"
    "4) Right: Move the robot right by one cell (+x).\n"
    "5) Pick: Pick up the ball if it is in the robot's cell.\n"
    "6) Check: Report the robot, ball and goal positions.\n"
    "7) Help: View the available action options."
)


def invert(mapping: dict[str, Cell]) -> dict[str, Cell]:
    return {k: (-dx, -dy) for k, (dx, dy) in mapping.items()}


PERTURBED_MAP = invert(BASIC_MAP)


def _cell(c: Cell) -> str:
    return f"({c[0]}, {c[1]})"


def _generate(rng: random.Random) -> tuple[Cell, Cell]:
    # Ball within L1 distance 3 of the start, goal within 4 of the ball.
    cells = [(x, y) for x in range(-2, 3) for y in range(-2, 3)]
    while True:
        ball = rng.choice(cells)
        goal = rng.choice(cells)
        if (
            ball != (0, 0) and goal != (0, 0) and ball != goal
            and abs(ball[0]) + abs(ball[1]) <= 3
            and abs(goal[0] - ball[0]) + abs(goal[1] - ball[1]) <= 4
        ):
            return ball, goal


class NavEnv(Environment):
    family = "nav"

    def __init__(self, spec: TaskSpec) -> None:
        super().__init__(spec)
        p = spec.params
        rng = random.Random(spec.seed)
        ball, goal = _generate(rng)
        self.robot: Cell = tuple(p.get("robot", (0, 0)))
        self.ball: Cell | None = tuple(p.get("ball", ball))
        self.goal: Cell = tuple(p.get("goal", goal))
        for name, c in (("robot", self.robot), ("ball", self.ball), ("goal", self.goal)):
            if not all(-BOUND <= v <= BOUND for v in c):
                raise ValueError(f"{name} {c} outside the grid")
        if self.goal == self.robot:
            raise ValueError("goal must differ from the start cell")
        self.start, self.ball_start = self.robot, self.ball
        self.mapping = PERTURBED_MAP if spec.variant == "perturbed" else BASIC_MAP

    @property
    def holding(self) -> bool:
        return self.ball is None

    def describe(self) -> str:
        return (
            f"A mobile robot moves on a grid whose x and y coordinates range from {-BOUND} to {BOUND}. "
            f"The robot starts at {_cell(self.start)}. "
            f"The goal is to reach the ball at {_cell(self.ball_start)}, pick it up, "
            f"and bring it to the goal location {_cell(self.goal)}.\n\n"
            "The robot has the following primitive actions:\n" + HELP
        )

    def help_text(self) -> str:
        return HELP

    def observable_state(self) -> str:
        return self.check()

    def check(self) -> str:
        ball = "held" if self.ball is None else _cell(self.ball)
        return f"Robot at {_cell(self.robot)}. Ball: {ball}. Goal at {_cell(self.goal)}."

    def move(self, direction: str) -> str:
        dx, dy = self.mapping[direction]
        x, y = self.robot[0] + dx, self.robot[1] + dy
        if not (-BOUND <= x <= BOUND and -BOUND <= y <= BOUND):
            return f"You bumped into the wall. Current position: {_cell(self.robot)}."
        self.robot = (x, y)
        return f"You moved. Current position: {_cell(self.robot)}."

    def pick(self) -> str:
        if self.ball is not None and self.ball == self.robot:
            self.ball = None
            return "You picked up the ball."
        return "There is no ball here."

    def _execute(self, command: str) -> str | None:
        low = command.lower()
        if low in self.mapping:
            return self.move(low)
        if low == "pick":
            return self.pick()
        if low == "check":
            return self.check()
        return None

    def _is_success(self) -> bool:
        return self.ball is None and self.robot == self.goal
