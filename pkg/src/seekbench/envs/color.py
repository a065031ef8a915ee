"""Paint mixing with labeled tubes and two containers."""

from __future__ import annotations

import random
import re
from collections import Counter
from functools import lru_cache
from importlib import resources
from typing import Iterable

from .core import Environment, TaskSpec

BASE_COLORS = ("red", "yellow", "blue", "white", "black")
CONTAINERS = ("A", "B")
MURKY = "murky"

HELP = (
    "1) Add <color> to <container>: Add 1 ml of paste from the tube with that label into container A or B.\n"
    "2) Check <container>: Look at the paint in container A or B.\n"
    "3) Clean <container>: Empty and clean container A or B.\n"
    "4) Help: View the available action options."
)


def parse_mixing_table(lines: Iterable[str]) -> dict[frozenset[str], str]:
    table: dict[frozenset[str], str] = {}
    for raw in lines:
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        pair, _, result = line.partition("=")
        a, _, b = pair.partition("+")
        a, b, result = a.strip(), b.strip(), result.strip()
        if not (a and b and result) or a == b:
            raise ValueError(f"bad mixing table line: {raw!r}")
        key = frozenset((a, b))
        if key in table:
            raise ValueError(f"duplicate pair {a}+{b}")
        table[key] = result
    return table


@lru_cache(maxsize=None)
def mixing_table() -> dict[frozenset[str], str]:
    text = resources.files("seekbench.envs").joinpath("data/mixing_table.txt").read_text(encoding="utf-8")
    return parse_mixing_table(text.splitlines())


def palette() -> frozenset[str]:
    return frozenset(BASE_COLORS) | frozenset(mixing_table().values()) | {MURKY}


def mix(contents: Iterable[tuple[str, int]]) -> tuple[str | None, int]:
    """Display color and total volume of a container.

    Ratios are ignored: two distinct pigments map through the pair table,
    three or more are murky.
    """
    amounts: Counter[str] = Counter()
    for color, ml in contents:
        if ml < 0:
            raise ValueError("negative volume")
        if color not in BASE_COLORS:
            raise ValueError(f"unknown pigment {color!r}")
        amounts[color] += ml
    total = sum(amounts.values())
    present = {c for c, ml in amounts.items() if ml > 0}
    if not present:
        return None, 0
    if len(present) == 1:
        return present.pop(), total
    if len(present) == 2:
        return mixing_table()[frozenset(present)], total
    return MURKY, total


def recipe(color: str) -> tuple[str, ...]:
    """Base pigments (one unit each) producing ``color``."""
    if color in BASE_COLORS:
        return (color,)
    for pair, result in sorted(mixing_table().items(), key=lambda kv: sorted(kv[0])):
        if result == color:
            return tuple(c for c in BASE_COLORS if c in pair)
    raise KeyError(color)


def _derangement(rng: random.Random, items: tuple[str, ...]) -> dict[str, str]:
    while True:
        perm = list(items)
        rng.shuffle(perm)
        if all(a != b for a, b in zip(items, perm)):
            return dict(zip(items, perm))


_ADD_RE = re.compile(r"^add\s+(\w+)\s+(?:to|into)\s+(?:container\s+)?(\w+)$", re.IGNORECASE)
_ONE_RE = re.compile(r"^(check|clean)\s+(?:container\s+)?(\w+)$", re.IGNORECASE)


class ColorEnv(Environment):
    """Produce a target volume of a target color in a named container.

    ``contaminated`` pre-fills one container with 1 ml of a random pigment;
    ``wronglabel`` relabels the tubes with a derangement.
    """

    family = "color"

    def __init__(self, spec: TaskSpec) -> None:
        super().__init__(spec)
        p = spec.params
        rng = random.Random(spec.seed)
        targets = sorted(set(BASE_COLORS) | set(mixing_table().values()))
        target_color = rng.choice(targets)
        target_container = rng.choice(CONTAINERS)
        self.target: tuple[str, int, str] = (
            p.get("target_color", target_color),
            int(p.get("target_volume", 2)),
            p.get("target_container", target_container),
        )
        if self.target[0] not in palette() or self.target[2] not in CONTAINERS:
            raise ValueError(f"bad target {self.target}")
        self.containers: dict[str, list[str]] = {c: [] for c in CONTAINERS}
        self.tubes = {c: c for c in BASE_COLORS}
        if spec.variant == "contaminated":
            where = p.get("contaminated_container", rng.choice(CONTAINERS))
            self.containers[where].append(p.get("contaminant", rng.choice(BASE_COLORS)))
        elif spec.variant == "wronglabel":
            self.tubes = dict(p["labels"]) if "labels" in p else _derangement(rng, BASE_COLORS)
            if sorted(self.tubes) != sorted(BASE_COLORS) or sorted(self.tubes.values()) != sorted(BASE_COLORS):
                raise ValueError("tube labels must permute the base colors")

    def describe(self) -> str:
        color, volume, container = self.target
        return (
            "There are five paint tubes labeled red, yellow, blue, white and black, and two containers A and B. "
            "Mixing two different paints gives a new color; mixing three or more gives a murky color.\n"
            f'Your task is to: "Create {volume} ml of {color} paint in container {container}".\n\n'
            "You have the following primitive actions:\n" + HELP
        )

    def help_text(self) -> str:
        return HELP

    def observable_state(self) -> str:
        return "Tubes: red, yellow, blue, white, black. Containers: A, B."

    def check(self, container: str) -> str:
        color, ml = mix((c, 1) for c in self.containers[container])
        if ml == 0:
            return f"Container {container} is empty."
        return f"Container {container} has {ml} ml of {color} paint."

    def add(self, label: str, container: str) -> str:
        self.containers[container].append(self.tubes[label])
        return f"You add 1 ml of paste from {label} tube into container {container}."

    def clean(self, container: str) -> str:
        self.containers[container].clear()
        return f"You clean container {container}."

    def _execute(self, command: str) -> str | None:
        m = _ADD_RE.match(command)
        if m:
            label, container = m.group(1).lower(), m.group(2).upper()
            if label in self.tubes and container in self.containers:
                return self.add(label, container)
            return None
        m = _ONE_RE.match(command)
        if m:
            verb, container = m.group(1).lower(), m.group(2).upper()
            if container not in self.containers:
                return None
            return self.check(container) if verb == "check" else self.clean(container)
        return None

    def _is_success(self) -> bool:
        color, volume, container = self.target
        return mix((c, 1) for c in self.containers[container]) == (color, volume)
