"""Text-completion backends: scripted replay, policy adapters and an HTTP chat client."""

from __future__ import annotations

import json
import logging
import os
import time
from typing import Any, Callable, Iterable, Protocol, Sequence, Union

import httpx

from .prompts import parse_history

log = logging.getLogger(__name__)

Message = dict[str, str]


class BackendError(RuntimeError):
    """Any failure to obtain a completion; the trial is marked errored."""


class TransportError(BackendError):
    def __init__(self, message: str, status: int | None = None) -> None:
        super().__init__(message)
        self.status = status


class ScriptedUnderflow(BackendError):
    pass


class Backend(Protocol):
    def complete(self, messages: Sequence[Message]) -> str: ...

    def describe(self) -> dict[str, Any]: ...


def _check_messages(messages: Sequence[Message]) -> None:
    if not messages:
        raise ValueError("messages must be non-empty")


class ScriptedBackend:
    """Replays a fixed list of replies, or asks a callable for each one.

    A callable receives the message list and returns the reply text.
    """

    def __init__(self, script: Union[Iterable[str], Callable[[Sequence[Message]], str]]) -> None:
        self._fn = script if callable(script) else None
        self._queue = [] if callable(script) else list(script)
        self.calls: list[list[Message]] = []

    def complete(self, messages: Sequence[Message]) -> str:
        _check_messages(messages)
        self.calls.append([dict(m) for m in messages])
        if self._fn is not None:
            return self._fn(messages)
        if not self._queue:
            raise ScriptedUnderflow(f"script exhausted after {len(self.calls) - 1} replies")
        return self._queue.pop(0)

    def describe(self) -> dict[str, Any]:
        return {"backend": "scripted"}


class ChatCompletionsBackend:
    """Client for the common ``/chat/completions`` HTTP protocol."""

    def __init__(
        self,
        base_url: str,
        model: str,
        api_key_env: str = "OPENAI_API_KEY",
        timeout: float = 60.0,
        max_retries: int = 2,
        backoff: float = 1.0,
        params: dict[str, Any] | None = None,
        transport: httpx.BaseTransport | None = None,
    ) -> None:
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.api_key_env = api_key_env
        self.timeout = timeout
        self.max_retries = max_retries
        self.backoff = backoff
        self.params = dict(params or {})
        self._client = httpx.Client(timeout=timeout, transport=transport)

    def describe(self) -> dict[str, Any]:
        # Sampling parameters left unset mean provider defaults.
        return {"backend": "chat", "base_url": self.base_url, "model": self.model, "params": self.params}

    def _headers(self) -> dict[str, str]:
        key = os.environ.get(self.api_key_env)
        return {"Authorization": f"Bearer {key}"} if key else {}

    def complete(self, messages: Sequence[Message]) -> str:
        _check_messages(messages)
        body = {"model": self.model, "messages": [dict(m) for m in messages], **self.params}
        url = f"{self.base_url}/chat/completions"
        last: TransportError | None = None
        for attempt in range(self.max_retries + 1):
            if attempt:
                time.sleep(self.backoff * 2 ** (attempt - 1))
            try:
                resp = self._client.post(url, json=body, headers=self._headers())
            except httpx.HTTPError as exc:
                last = TransportError(f"{type(exc).__name__}: {exc}")
                log.warning("chat request failed (attempt %d): %s", attempt + 1, last)
                continue
            if resp.status_code == 429 or resp.status_code >= 500:
                last = TransportError(f"HTTP {resp.status_code}", resp.status_code)
                log.warning("chat request failed (attempt %d): %s", attempt + 1, last)
                continue
            if not resp.is_success:
                raise TransportError(f"HTTP {resp.status_code}: {resp.text[:200]}", resp.status_code)
            try:
                return resp.json()["choices"][0]["message"]["content"]
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                raise TransportError(f"unexpected response body: {exc}") from exc
        assert last is not None
        raise last

    def close(self) -> None:
        self._client.close()


# -- policy adapter ---------------------------------------------------------

_DOMAIN_HEADER = "# Domain Description\n"
_LLM3_STATE = "\n\nThe current environment state is:\n"


def _section(prompt: str, header: str) -> str:
    start = prompt.index(header) + len(header)
    end = prompt.find("\n\n# ", start)
    end = prompt.find("\n\nPlease provide", start) if end < 0 else end
    return prompt[start:end if end >= 0 else None]


def prompt_kind(prompt: str) -> str:
    if "# Now it's your turn\n" in prompt:
        return "react"
    if '"Steps"' in prompt:
        return "seek"
    if '"Information"' in prompt:
        return "extract"
    if '"Solution Plan"' in prompt:
        return "plan"
    if '"Full Plan"' in prompt:
        return "full_plan"
    return "unknown"


class PolicyBackend:
    """Answers agent prompts with a scripted text-level policy.

    The policy only sees what the prompt shows: the domain description and
    the rendered interaction history.
    """

    def __init__(self, policy: Any) -> None:
        self.policy = policy
        self.calls = 0

    def describe(self) -> dict[str, Any]:
        return {"backend": "policy", "policy": type(self.policy).__name__}

    def _domain_and_history(self, prompt: str) -> tuple[str, list[tuple[str, str]]]:
        if _DOMAIN_HEADER in prompt:
            domain = _section(prompt, _DOMAIN_HEADER)
        else:
            # LLM3 layout: the description sits between the preamble and the state.
            head = prompt[: prompt.index(_LLM3_STATE)]
            domain = head.split("\n\n", 1)[1]
        history = parse_history(prompt.split(_DOMAIN_HEADER, 1)[-1])
        return domain, history

    def complete(self, messages: Sequence[Message]) -> str:
        _check_messages(messages)
        self.calls += 1
        prompt = messages[0]["content"]
        kind = prompt_kind(prompt)
        if kind == "react":
            return "End"
        if kind == "unknown":
            raise BackendError("policy backend cannot answer this prompt")
        domain, history = self._domain_and_history(prompt)
        if kind == "extract":
            return json.dumps({"Reasoning": "Summary of observed interactions.",
                               "Information": f"{len(history)} interactions observed."})
        if kind == "seek":
            actions = self.policy.seek(domain, history) or ["Help"]
            return json.dumps({"Reasoning": "Probe the environment.",
                               "Steps": [{"Goal": "Gather information", "Action Plan": actions}]})
        actions = self.policy.plan(domain, history)
        key = "Solution Plan" if kind == "plan" else "Full Plan"
        return json.dumps({"Reasoning": "Plan from the observed history.", key: actions})
