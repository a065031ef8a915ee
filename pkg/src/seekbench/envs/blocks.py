"""Block stacking with a one-block hand and a one-block inventory."""

from __future__ import annotations

import random
import re

from .core import Environment, TaskSpec

BLOCK_COLORS = ("red", "blue", "green", "yellow", "orange", "purple", "white")

HELP = (
    "1) Pick i: Pick up the top block of stack i into your hand.\n"
    "2) Place i: Place the block in your hand on top of stack i.\n"
    "3) Stash: Put the block in your hand into the inventory.\n"
    "4) Retrieve: Take the block in the inventory into your hand.\n"
    "5) Inspect: Look inside the inventory.\n"
    "6) Check: Show the stacks, your hand and the inventory.\n"
    "7) Help: View the available action options."
)

SIZES = {"single": (3, 4, (1, 1)), "multiple": (4, 7, (2, 3))}


def _listing(blocks) -> str:
    return "[" + ", ".join(blocks) + "]"


def _split(rng: random.Random, items: list[str], parts: int, min_size: int = 1) -> list[list[str]]:
    """Random contiguous split of ``items`` into ``parts`` pieces of at least ``min_size``."""
    n = len(items)
    while True:
        cuts = sorted(rng.sample(range(1, n), parts - 1)) if parts > 1 else []
        bounds = [0, *cuts, n]
        pieces = [items[a:b] for a, b in zip(bounds, bounds[1:])]
        if all(len(piece) >= min_size for piece in pieces):
            return pieces


def generate(rng: random.Random, size: str) -> tuple[list[list[str]], str, list[list[str]]]:
    """Initial stacks, inventory block and goal stacks for a seeded instance."""
    n_stacks, n_blocks, (g_lo, g_hi) = SIZES[size]
    colors = rng.sample(BLOCK_COLORS, n_blocks)
    n_goal = rng.randint(g_lo, g_hi)
    goal_order = colors[:]
    rng.shuffle(goal_order)
    goal = _split(rng, goal_order, n_goal, min_size=2 if n_goal > 1 else 1)
    start = colors[:]
    rng.shuffle(start)
    inventory = start.pop()
    stacks: list[list[str]] = [[] for _ in range(n_stacks)]
    for block in start:
        stacks[rng.randrange(n_stacks)].append(block)
    return stacks, inventory, goal


_INDEX_RE = re.compile(r"^(pick|place)\s+(?:stack\s+)?(\d+)$", re.IGNORECASE)


class BlocksEnv(Environment):
    """Rearrange blocks into goal stacks; stack positions do not matter.

    In perturbed variants the inventory contents are hidden until the
    agent inspects or retrieves from it.
    """

    family = "blocks"

    def __init__(self, spec: TaskSpec) -> None:
        super().__init__(spec)
        p = spec.params
        rng = random.Random(spec.seed)
        stacks, inventory, goal = generate(rng, spec.size or "single")
        self.stacks: list[list[str]] = [list(s) for s in p.get("stacks", stacks)]
        self.inventory: str | None = p.get("inventory", inventory)
        self.goal: list[list[str]] = [list(s) for s in p.get("goal", goal)]
        self.hand: str | None = None
        self.inventory_revealed = spec.variant != "perturbed"
        self._initial_blocks = sorted(self.blocks())
        if sorted(b for s in self.goal for b in s) != self._initial_blocks:
            raise ValueError("goal stacks must use exactly the blocks in play")

    def blocks(self) -> list[str]:
        out = [b for s in self.stacks for b in s]
        out += [b for b in (self.hand, self.inventory) if b is not None]
        return out

    def describe(self) -> str:
        goal = " ".join(f"{_listing(s)}" for s in self.goal)
        return (
            f"There are {len(self.stacks)} stacks of colored blocks, numbered 1 to {len(self.stacks)}, "
            "and an inventory that can hold at most one block. "
            "You can hold at most one block in your hand, and you can only pick up or place blocks at the top of a stack.\n"
            f"The goal is to rearrange the blocks into the following stacks (bottom to top): {goal}. "
            "Which stack position each goal stack occupies does not matter, and your hand must be empty at the end.\n\n"
            "You have the following primitive actions:\n" + HELP
        )

    def help_text(self) -> str:
        return HELP

    def observable_state(self) -> str:
        return self.check()

    def _inventory_text(self) -> str:
        return _listing([self.inventory] if self.inventory else [])

    def check(self) -> str:
        stacks = " ".join(f"{i}: {_listing(s)}" for i, s in enumerate(self.stacks, 1))
        hand = _listing([self.hand] if self.hand else [])
        inventory = self._inventory_text() if self.inventory_revealed else "unknown"
        return f"Stacks: {stacks} Hand: {hand} Inventory: {inventory}"

    def pick(self, i: int) -> str:
        if self.hand is not None:
            return "Your hand is occupied."
        stack = self.stacks[i - 1]
        if not stack:
            return f"Stack {i} is empty."
        self.hand = stack.pop()
        return f"You picked up the {self.hand} block from stack {i}."

    def place(self, i: int) -> str:
        if self.hand is None:
            return "Your hand is empty."
        block, self.hand = self.hand, None
        self.stacks[i - 1].append(block)
        return f"You placed the {block} block on stack {i}."

    def stash(self) -> str:
        if self.hand is None:
            return "Your hand is empty."
        if self.inventory is not None:
            return "Inventory is full."
        block, self.hand = self.hand, None
        self.inventory = block
        return f"You put the {block} block into the inventory."

    def retrieve(self) -> str:
        if self.hand is not None:
            return "Your hand is occupied."
        self.inventory_revealed = True
        if self.inventory is None:
            return "Inventory is empty."
        self.hand, self.inventory = self.inventory, None
        return f"You took the {self.hand} block from the inventory."

    def inspect(self) -> str:
        self.inventory_revealed = True
        return f"Inventory: {self._inventory_text()}"

    def _execute(self, command: str) -> str | None:
        low = command.lower()
        m = _INDEX_RE.match(command)
        if m:
            i = int(m.group(2))
            if not 1 <= i <= len(self.stacks):
                return None
            return self.pick(i) if m.group(1).lower() == "pick" else self.place(i)
        simple = {"stash": self.stash, "retrieve": self.retrieve, "inspect": self.inspect, "check": self.check}
        if low in simple:
            return simple[low]()
        return None

    def _is_success(self) -> bool:
        if self.hand is not None:
            return False
        current = sorted(tuple(s) for s in self.stacks if s)
        return current == sorted(tuple(s) for s in self.goal)
