"""Tolerant extraction of JSON plans from model replies."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

SHAPES = {"steps": "Steps", "solution_plan": "Solution Plan", "full_plan": "Full Plan", "information": "Information"}
_FENCE_RE = re.compile(r"```(?:json|JSON)?\s*\n?(.*?)```", re.S)


class MalformedResponse(ValueError):
    def __init__(self, message: str, raw: str) -> None:
        super().__init__(message)
        self.raw = raw


@dataclass(frozen=True)
class Step:
    goal: str
    actions: tuple[str, ...]


@dataclass(frozen=True)
class PlanResponse:
    reasoning: str
    steps: tuple[Step, ...] = ()
    plan: tuple[str, ...] = ()
    information: str = ""
    raw: str = field(default="", repr=False, compare=False)

    @property
    def actions(self) -> list[str]:
        """All actions in execution order."""
        if self.steps:
            return [a for s in self.steps for a in s.actions]
        return list(self.plan)


def first_json_object(text: str) -> dict | None:
    """First decodable JSON object in ``text``, looking inside code fences first."""
    decoder = json.JSONDecoder()
    candidates = [m.group(1) for m in _FENCE_RE.finditer(text)] + [text]
    for chunk in candidates:
        for i, ch in enumerate(chunk):
            if ch != "{":
                continue
            try:
                obj, _ = decoder.raw_decode(chunk, i)
            except json.JSONDecodeError:
                continue
            if isinstance(obj, dict):
                return obj
    return None


def _get(obj: dict, key: str):
    for k, v in obj.items():
        if isinstance(k, str) and k.strip().lower() == key.lower():
            return v
    return None


def _actions(value, raw: str) -> tuple[str, ...]:
    if not isinstance(value, list) or not all(isinstance(a, str) for a in value):
        raise MalformedResponse("action list must be a list of strings", raw)
    out = []
    for a in value:
        a = a.strip()
        if not a:
            continue
        if "\n" in a or "\r" in a:
            raise MalformedResponse(f"action is not a single line: {a!r}", raw)
        out.append(a)
    return tuple(out)


def parse_plan_response(raw: str, expected_shape: str) -> PlanResponse:
    """Parse a reply of shape ``steps``, ``solution_plan``, ``full_plan`` or ``information``."""
    if expected_shape not in SHAPES:
        raise ValueError(f"unknown response shape {expected_shape!r}")
    obj = first_json_object(raw)
    if obj is None:
        raise MalformedResponse("no JSON object found", raw)
    reasoning = _get(obj, "Reasoning")
    reasoning = reasoning if isinstance(reasoning, str) else ""
    key = SHAPES[expected_shape]
    value = _get(obj, key)
    if value is None:
        raise MalformedResponse(f"missing key {key!r}", raw)
    if expected_shape == "information":
        text = value if isinstance(value, str) else json.dumps(value, ensure_ascii=False)
        if not text.strip():
            raise MalformedResponse("empty information", raw)
        return PlanResponse(reasoning, information=text.strip(), raw=raw)
    if expected_shape == "steps":
        if not isinstance(value, list):
            raise MalformedResponse("'Steps' must be a list", raw)
        steps = []
        for item in value:
            if not isinstance(item, dict):
                raise MalformedResponse("each step must be an object", raw)
            goal = _get(item, "Goal")
            acts = _get(item, "Action Plan")
            if acts is None:
                acts = _get(item, "Actions")
            steps.append(Step(goal if isinstance(goal, str) else "", _actions(acts, raw)))
        response = PlanResponse(reasoning, steps=tuple(steps), raw=raw)
    else:
        response = PlanResponse(reasoning, plan=_actions(value, raw), raw=raw)
    if not response.actions:
        raise MalformedResponse("plan contains no actions", raw)
    return response
