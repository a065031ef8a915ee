"""Scripted block-stacking policies built on a constructive planner."""

from __future__ import annotations

import re
from typing import Sequence

History = Sequence[tuple[str, str]]

_GOAL_RE = re.compile(r"following stacks \(bottom to top\): (.*?)\. Which")
_LIST_RE = re.compile(r"\[([^\]]*)\]")
_STACK_RE = re.compile(r"(\d+): \[([^\]]*)\]")
_STATE_RE = re.compile(r"Stacks: (.*) Hand: \[([^\]]*)\] Inventory: (\[[^\]]*\]|unknown)")
_INSPECT_RE = re.compile(r"^Inventory: \[([^\]]*)\]$")


def _items(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def parse_goal(description: str) -> list[list[str]]:
    m = _GOAL_RE.search(description)
    if not m:
        raise ValueError("no goal stacks in description")
    return [_items(s) for s in _LIST_RE.findall(m.group(1))]


class State:
    def __init__(self, stacks: list[list[str]], hand: str | None, inventory: str | None, inventory_known: bool) -> None:
        self.stacks = stacks
        self.hand = hand
        self.inventory = inventory
        self.inventory_known = inventory_known


def parse_state(obs: str) -> State | None:
    m = _STATE_RE.search(obs)
    if not m:
        return None
    stacks = [_items(body) for _, body in _STACK_RE.findall(m.group(1))]
    hand = (_items(m.group(2)) or [None])[0]
    inv_text = m.group(3)
    known = inv_text != "unknown"
    inventory = (_items(inv_text[1:-1]) or [None])[0] if known else None
    return State(stacks, hand, inventory, known)


def latest_state(history: History) -> State | None:
    """State from the most recent Check, with inventory facts from later or earlier Inspects."""
    state = None
    inventory: tuple[str | None] | None = None
    for action, obs in history:
        s = parse_state(obs)
        if s is not None:
            state = s
            if s.inventory_known:
                inventory = (s.inventory,)
            continue
        m = _INSPECT_RE.match(obs)
        if m:
            inventory = ((_items(m.group(1)) or [None])[0],)
        elif state is not None:
            # Any other action after the Check invalidates it.
            state = None
    if state is not None and not state.inventory_known and inventory is not None:
        state.inventory, state.inventory_known = inventory[0], True
    return state


def plan_blocks(state: State, goal: list[list[str]]) -> list[str]:
    """Action sequence reaching ``goal`` from ``state`` using the inventory as a buffer."""
    st = [list(s) for s in state.stacks]
    inv = state.inventory
    actions: list[str] = []
    complete: set[int] = set()

    def pick(i: int) -> str:
        actions.append(f"Pick {i + 1}")
        return st[i].pop()

    def place(i: int, b: str) -> None:
        actions.append(f"Place {i + 1}")
        st[i].append(b)

    def shift(src: int, dst: int) -> None:
        place(dst, pick(src))

    def open_stacks(*exclude: int) -> list[int]:
        return [i for i in range(len(st)) if i not in complete and i not in exclude]

    if state.hand is not None:
        place(min(open_stacks(), key=lambda i: len(st[i])), state.hand)
    if inv is not None:
        actions.append("Retrieve")
        place(min(open_stacks(), key=lambda i: len(st[i])), inv)
        inv = None

    def prefix(i: int, g: list[str]) -> int:
        n = 0
        while n < min(len(st[i]), len(g)) and st[i][n] == g[n]:
            n += 1
        return n

    for g in sorted(goal, key=len, reverse=True):
        candidates = open_stacks()
        x = max(candidates, key=lambda i: (prefix(i, g), -i))
        keep = prefix(x, g)
        others = open_stacks(x)
        if not others and len(st[x]) > keep:
            raise ValueError("no free stack to clear onto")
        while len(st[x]) > keep:
            shift(x, min(others, key=lambda i: len(st[i])))
        for b in g[keep:]:
            src = next((i for i in range(len(st)) if b in st[i]), None)
            if src is None:
                break  # block not visible; this goal cannot be finished
            depth = len(st[src]) - 1 - st[src].index(b)
            free = open_stacks(x, src)
            if depth and free:
                for _ in range(depth):
                    shift(src, free[0])
            elif depth:
                for _ in range(depth):
                    shift(src, x)
                inv = pick(src)
                actions.append("Stash")
                for _ in range(depth):
                    shift(x, src)
                actions.append("Retrieve")
                place(x, inv)
                inv = None
                continue
            shift(src, x)
        complete.add(x)
    return actions


class BlocksSeeker:
    """Inspect the inventory and the stacks before planning."""

    def seek(self, description: str, history: History) -> list[str]:
        return ["Inspect", "Check"]

    def plan(self, description: str, history: History) -> list[str]:
        state = latest_state(history)
        if state is None or not state.inventory_known:
            return ["Inspect", "Check"]
        return plan_blocks(state, parse_goal(description)) + ["Check"]


class BlocksNaive:
    """Reads the stacks but treats an unrevealed inventory as empty."""

    def seek(self, description: str, history: History) -> list[str]:
        return []

    def plan(self, description: str, history: History) -> list[str]:
        state = latest_state(history)
        if state is None:
            return ["Check"]
        return plan_blocks(state, parse_goal(description)) + ["Check"]
