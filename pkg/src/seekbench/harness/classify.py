"""Post-hoc failure categorization."""

from __future__ import annotations

from typing import Any, Sequence

from ..agent.backends import Backend, BackendError
from ..agent.parsing import first_json_object
from ..agent.prompts import NO_HISTORY, format_history, load_template, render_prompt
from ..envs.core import INVALID_ACTION, Entry
from .records import FailureCategory, RunRecord

_BY_NAME = {c.value.lower(): c for c in FailureCategory}


def _normalize(text: str) -> FailureCategory | None:
    key = "".join(ch for ch in text.lower() if ch.isalpha())
    return _BY_NAME.get(key)


def rule_category(entries: Sequence[Entry], information: Sequence[str | None] = ()) -> FailureCategory:
    """Deterministic stand-in for the model classifier.

    No seek-phase actions at all means the agent never probed; invalid
    commands suggest it misread the action syntax; a recorded extraction
    that did not help points at extraction; otherwise the plan itself failed.
    """
    tags = {(e.tag or "").partition(":")[2] for e in entries}
    if "seek" not in tags:
        return FailureCategory.INFORMATION_SEEKING
    if any(e.observation == INVALID_ACTION for e in entries):
        return FailureCategory.INSTRUCTION_UNDERSTANDING
    if any(info and info != "None" for info in information):
        return FailureCategory.INFORMATION_EXTRACTION
    return FailureCategory.LONG_HORIZON_PLANNING


def classify_failure(
    record: RunRecord,
    entries: Sequence[Entry],
    domain_desc: str = "",
    information: Sequence[str | None] = (),
    backend: Backend | None = None,
) -> FailureCategory | None:
    """Assign a category to a failed run and store it on ``record``.

    Without a backend the rule stub decides. With one, the model's answer
    is parsed; an unusable answer leaves the category empty and sets
    ``record.failure_note``.
    """
    if record.success:
        raise ValueError("only failed runs can be classified")
    if backend is None:
        category = rule_category(entries, information)
    else:
        prompt = render_prompt(load_template("classify_failure"), {
            "domain_desc": domain_desc,
            "interaction_history": format_history(entries) if entries else NO_HISTORY,
            "information": "\n".join(i for i in information if i) or "None",
        })
        try:
            reply = backend.complete([{"role": "user", "content": prompt}])
        except BackendError as exc:
            record.failure_note = f"classifier error: {exc}"
            return None
        obj: Any = first_json_object(reply)
        raw = obj.get("Category") if isinstance(obj, dict) else reply
        category = _normalize(str(raw)) if raw is not None else None
        if category is None:
            record.failure_note = "unparseable category"
            return None
    record.failure_category = category.value
    return category
