"""Prompt templates, placeholder rendering and history formatting."""

from __future__ import annotations

import re
from dataclasses import dataclass, fields
from functools import lru_cache
from importlib import resources
from typing import Iterable, Mapping, Sequence

from ..envs.core import Entry

PLACEHOLDERS = ("domain_desc", "interaction_history", "information", "current_state")
NO_HISTORY = "No previous plan"
_PLACEHOLDER_RE = re.compile(r"\{(" + "|".join(PLACEHOLDERS) + r")\}")

TEMPLATE_FILES = {
    "seek_initial": "seek_initial.txt",
    "seek_with_history": "seek_with_history.txt",
    "extract": "extract.txt",
    "plan": "plan.txt",
    "llm3_backtrack": "llm3_backtrack.txt",
    "llm3_from_scratch": "llm3_from_scratch.txt",
    "react_fewshot": "react_fewshot.txt",
    "icl": "icl.txt",
    "uncertainty_preamble": "uncertainty.txt",
    "classify_failure": "classify_failure.txt",
}


class RenderError(KeyError):
    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(f"no binding for placeholder {{{name}}}")

    def __str__(self) -> str:
        return self.args[0]


def placeholders(template: str) -> list[str]:
    """Placeholder names in order of first appearance."""
    seen: list[str] = []
    for m in _PLACEHOLDER_RE.finditer(template):
        if m.group(1) not in seen:
            seen.append(m.group(1))
    return seen


def render_prompt(template: str, bindings: Mapping[str, str]) -> str:
    """Literal substitution of ``{name}`` placeholders.

    Other braces (the JSON examples in the templates) are left alone.
    """
    for name in placeholders(template):
        if name not in bindings:
            raise RenderError(name)
    return _PLACEHOLDER_RE.sub(lambda m: str(bindings[m.group(1)]), template)


@lru_cache(maxsize=None)
def load_template(name: str) -> str:
    fname = TEMPLATE_FILES[name]
    return resources.files("seekbench.agent").joinpath("prompts", fname).read_text(encoding="utf-8")


@dataclass(frozen=True)
class PromptSet:
    seek_initial: str
    seek_with_history: str
    extract: str
    plan: str
    llm3_backtrack: str
    llm3_from_scratch: str
    react_fewshot: str
    icl: str
    uncertainty_preamble: str

    @classmethod
    def default(cls) -> "PromptSet":
        return cls(**{f.name: load_template(f.name) for f in fields(cls)})

    def with_uncertainty(self, template: str) -> str:
        """Insert the uncertainty sentence after the template's first line."""
        sentence = self.uncertainty_preamble.rstrip("\n").splitlines()[-1]
        first, sep, rest = template.partition("\n")
        return first + "\n" + sentence + sep + rest


def _obs_lines(text: str) -> list[str]:
    lines = text.splitlines() or [""]
    return [f"- Obs: {lines[0]}"] + [f"  {line}" for line in lines[1:]]


def _attempt_header(tag: str) -> str | None:
    attempt, _, phase = tag.partition(":")
    label = {"seek": "Information seeking", "plan": "Task plan"}.get(phase, phase or "Actions")
    return f"## Attempt {attempt}: {label}" if attempt.isdigit() else f"## {tag}"


def format_history(entries: Sequence[Entry] | Iterable[Entry]) -> str:
    """Render entries as '- Act:' / '- Obs:' lines grouped by their tags."""
    lines: list[str] = []
    current: object = object()
    for e in entries:
        if e.tag != current:
            current = e.tag
            if e.tag is not None:
                if lines:
                    lines.append("")
                lines.append(_attempt_header(e.tag))
        lines.append(f"- Act: {e.action}")
        lines.extend(_obs_lines(e.observation))
    return "\n".join(lines) if lines else NO_HISTORY


def parse_history(text: str) -> list[tuple[str, str]]:
    """Inverse of ``format_history`` for the Act/Obs lines (headers dropped)."""
    pairs: list[tuple[str, str]] = []
    for line in text.splitlines():
        if line.startswith("- Act: "):
            pairs.append((line[len("- Act: "):], ""))
        elif line.startswith("- Obs: ") and pairs:
            a, _ = pairs[-1]
            pairs[-1] = (a, line[len("- Obs: "):])
        elif line.startswith("  ") and pairs:
            a, o = pairs[-1]
            pairs[-1] = (a, o + "\n" + line[2:])
    return pairs


def format_react_history(lines: Sequence[tuple[str, str]]) -> str:
    """ReAct transcript: '> action' followed by the observation."""
    return "".join(f"> {a}\n{o}\n" for a, o in lines)
