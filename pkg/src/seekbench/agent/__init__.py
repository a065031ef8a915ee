"""LLM planning loops over the text environments."""

from __future__ import annotations

from .backends import (
    Backend,
    BackendError,
    ChatCompletionsBackend,
    PolicyBackend,
    ScriptedBackend,
    ScriptedUnderflow,
    TransportError,
)
from .loop import METHODS, AgentConfig, AgentRun, AttemptLog, run_agent, run_baseline, run_infoseeker
from .parsing import MalformedResponse, PlanResponse, Step, parse_plan_response
from .prompts import NO_HISTORY, PromptSet, RenderError, format_history, render_prompt

__all__ = [
    "METHODS", "NO_HISTORY", "AgentConfig", "AgentRun", "AttemptLog", "Backend", "BackendError",
    "ChatCompletionsBackend", "MalformedResponse", "PlanResponse", "PolicyBackend", "PromptSet",
    "RenderError", "ScriptedBackend", "ScriptedUnderflow", "Step", "TransportError", "format_history",
    "parse_plan_response", "render_prompt", "run_agent", "run_baseline", "run_infoseeker",
]
