"""Scripted text-level policies used as oracles and as stand-in LLM backends.

A policy exposes ``seek(description, history)`` and ``plan(description, history)``,
each returning a list of action strings. ``history`` is a sequence of
``(action, observation)`` pairs since the last reset.
"""

from __future__ import annotations

from typing import Protocol, Sequence

from ..envs.core import Environment
from .arm import ArmNaive, ArmSeeker
from .blocks import BlocksNaive, BlocksSeeker
from .color import ColorNaive, ColorSeeker
from .nav import NavNaive, NavSeeker


class Policy(Protocol):
    def seek(self, description: str, history: Sequence[tuple[str, str]]) -> list[str]: ...

    def plan(self, description: str, history: Sequence[tuple[str, str]]) -> list[str]: ...


SEEKERS = {"arm": ArmSeeker, "nav": NavSeeker, "color": ColorSeeker, "blocks": BlocksSeeker}
NAIVE = {"arm": ArmNaive, "nav": NavNaive, "color": ColorNaive, "blocks": BlocksNaive}


def make_policy(family: str, kind: str = "seeker") -> Policy:
    table = {"seeker": SEEKERS, "naive": NAIVE}[kind]
    return table[family]()


def run_policy(env: Environment, policy: Policy, max_rounds: int = 50) -> bool:
    """Alternate seek and plan phases until the episode ends."""
    description = env.describe()

    def execute(actions: list[str]) -> None:
        for a in actions:
            if env.done:
                return
            env.step(a)

    for _ in range(max_rounds):
        if env.done:
            break
        pairs = [(e.action, e.observation) for e in env.transcript.entries]
        execute(policy.seek(description, pairs))
        if env.done:
            break
        pairs = [(e.action, e.observation) for e in env.transcript.entries]
        execute(policy.plan(description, pairs))
    return env.success


__all__ = ["NAIVE", "SEEKERS", "Policy", "make_policy", "run_policy"]
