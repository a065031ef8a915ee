"""Planning loops: the infoseeker method (seek, extract, plan) and the baseline planners."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from typing import Any, Sequence

from ..envs.core import Environment
from .backends import Backend, BackendError, Message
from .parsing import MalformedResponse, PlanResponse, parse_plan_response
from .prompts import NO_HISTORY, PromptSet, format_history, format_react_history, render_prompt

METHODS = ("infoseeker", "vanilla", "llm3_fs", "llm3_bt", "react", "icl")
NO_INFORMATION = "None"
MAX_INFORMATION_CHARS = 2000
REPROMPT_NOTE = (
    "Your previous reply could not be parsed ({error}). "
    "Reply again with only the JSON object in the requested format."
)
REACT_THINK_REPLY = "OK."
REACT_MAX_IDLE = 10  # consecutive replies without an environment step


@dataclass(frozen=True)
class AgentConfig:
    method: str = "infoseeker"
    max_attempts: int = 5
    step_budget: int = 100
    seek_enabled: bool = True
    extract_enabled: bool = True
    trace_window: int = 5
    uncertainty_prompt: bool = False
    deadline_s: float | None = None

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {', '.join(METHODS)}")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")
        if self.step_budget < 1:
            raise ValueError("step_budget must be >= 1")
        if self.trace_window < 1:
            raise ValueError("trace_window must be >= 1")

    @classmethod
    def vanilla(cls, **kw: Any) -> "AgentConfig":
        return cls(method="vanilla", seek_enabled=False, extract_enabled=False, **kw)


@dataclass
class Exchange:
    attempt: int
    phase: str
    messages: list[Message]
    response: str


@dataclass
class AttemptLog:
    n: int
    seek_actions: list[str] = field(default_factory=list)
    seek_steps: int = 0
    information: str | None = None
    plan_actions: list[str] = field(default_factory=list)
    plan_steps: int = 0
    malformed: list[str] = field(default_factory=list)

    @property
    def steps(self) -> int:
        return self.seek_steps + self.plan_steps


@dataclass
class AgentRun:
    method: str
    success: bool = False
    steps_used: int = 0
    attempts_used: int = 0
    errored: bool = False
    error: str | None = None
    deadline_hit: bool = False
    attempts: list[AttemptLog] = field(default_factory=list)
    exchanges: list[Exchange] = field(default_factory=list)
    backend: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


class _Session:
    """Budget, deadline and logging shared by all loops."""

    def __init__(self, env: Environment, backend: Backend, config: AgentConfig) -> None:
        self.env = env
        self.backend = backend
        self.config = config
        self.k_max = min(config.step_budget, env.spec.step_budget)
        self.deadline = None if config.deadline_s is None else time.monotonic() + config.deadline_s
        self.run = AgentRun(config.method, backend=_describe(backend))

    # -- stopping ----------------------------------------------------------
    def out_of_time(self) -> bool:
        if self.deadline is not None and time.monotonic() >= self.deadline:
            self.run.deadline_hit = True
            return True
        return False

    def finished(self) -> bool:
        return self.env.done or self.env.steps_used >= self.k_max or self.out_of_time()

    def execute(self, actions: Sequence[str], tag: str) -> int:
        """Run actions until done or out of budget; returns the count executed."""
        n = 0
        for action in actions:
            if self.finished():
                break
            self.env.step(action, tag=tag)
            n += 1
        return n

    # -- model calls -------------------------------------------------------
    def ask(self, attempt: int, phase: str, messages: list[Message]) -> str:
        reply = self.backend.complete(messages)
        self.run.exchanges.append(Exchange(attempt, phase, [dict(m) for m in messages], reply))
        return reply

    def ask_parsed(self, log: AttemptLog, phase: str, prompt: str, shape: str) -> PlanResponse | None:
        """Query and parse, reprompting once on a malformed reply."""
        messages: list[Message] = [{"role": "user", "content": prompt}]
        reply = self.ask(log.n, phase, messages)
        try:
            return parse_plan_response(reply, shape)
        except MalformedResponse as exc:
            log.malformed.append(f"{phase}: {exc}")
            messages = messages + [
                {"role": "assistant", "content": reply},
                {"role": "user", "content": REPROMPT_NOTE.format(error=exc)},
            ]
        reply = self.ask(log.n, phase, messages)
        try:
            return parse_plan_response(reply, shape)
        except MalformedResponse as exc:
            log.malformed.append(f"{phase}: {exc}")
            return None

    def close(self) -> AgentRun:
        self.run.success = self.env.success
        self.run.steps_used = self.env.steps_used
        return self.run


def _describe(backend: Backend) -> dict[str, Any]:
    describe = getattr(backend, "describe", None)
    return describe() if callable(describe) else {"backend": type(backend).__name__}


def _history(entries) -> str:
    return format_history(entries)


def _plan_prompt(session: _Session, prompts: PromptSet, information: str) -> str:
    env = session.env
    template = prompts.plan
    if session.config.uncertainty_prompt and session.config.method != "infoseeker":
        template = prompts.with_uncertainty(template)
    return render_prompt(template, {
        "domain_desc": env.describe(),
        "interaction_history": _history(env.history_since_marker()),
        "information": information,
    })


def _extract(session: _Session, prompts: PromptSet, log: AttemptLog) -> str:
    env = session.env
    prompt = render_prompt(prompts.extract, {
        "domain_desc": env.describe(),
        "interaction_history": _history(env.history_since_marker()),
    })
    reply = session.ask(log.n, "extract", [{"role": "user", "content": prompt}])
    try:
        info = parse_plan_response(reply, "information").information
    except MalformedResponse:
        info = reply.strip() or NO_INFORMATION
    return info[:MAX_INFORMATION_CHARS]


def run_infoseeker(env: Environment, backend: Backend, config: AgentConfig | None = None,
                   prompts: PromptSet | None = None) -> AgentRun:
    """Seek, extract, plan and execute for up to ``max_attempts`` attempts.

    The history shown to the model is cleared (via a transcript marker)
    right before each plan executes, so the next seek prompt sees only the
    latest plan's trajectory.
    """
    config = config or AgentConfig()
    prompts = prompts or PromptSet.default()
    session = _Session(env, backend, config)
    try:
        for n in range(1, config.max_attempts + 1):
            if session.finished():
                break
            log = AttemptLog(n)
            session.run.attempts.append(log)
            session.run.attempts_used = n
            if config.seek_enabled:
                past = env.history_since_marker()
                template = prompts.seek_with_history if past else prompts.seek_initial
                bindings = {"domain_desc": env.describe()}
                if past:
                    bindings["interaction_history"] = _history(past)
                seek = session.ask_parsed(log, "seek", render_prompt(template, bindings), "steps")
                if seek is None:
                    continue
                log.seek_actions = seek.actions
                log.seek_steps = session.execute(seek.actions, f"{n}:seek")
                if session.finished():
                    break
            information = NO_INFORMATION
            if config.extract_enabled:
                information = _extract(session, prompts, log)
                log.information = information
            plan = session.ask_parsed(log, "plan", _plan_prompt(session, prompts, information), "solution_plan")
            if plan is None:
                continue
            env.mark_history()
            log.plan_actions = plan.actions
            log.plan_steps = session.execute(plan.actions, f"{n}:plan")
    except BackendError as exc:
        session.run.errored, session.run.error = True, str(exc)
    return session.close()


# -- baselines -----------------------------------------------------------------

def _trace(env: Environment, window: int) -> str:
    """Entries of the last ``window`` attempts, grouped by attempt tag."""
    entries = env.transcript.entries
    tags: list[str | None] = []
    for e in entries:
        if not tags or tags[-1] != e.tag:
            tags.append(e.tag)
    keep = set(tags[-window:])
    recent = [e for e in entries if e.tag in keep]
    return format_history(recent) if recent else NO_HISTORY


def _full_plan_loop(session: _Session, prompts: PromptSet) -> None:
    env, config = session.env, session.config
    base = {
        "llm3_fs": prompts.llm3_from_scratch,
        "llm3_bt": prompts.llm3_backtrack,
        "icl": prompts.icl,
    }[config.method]
    template = prompts.with_uncertainty(base) if config.uncertainty_prompt else base
    for n in range(1, config.max_attempts + 1):
        if session.finished():
            break
        log = AttemptLog(n)
        session.run.attempts.append(log)
        session.run.attempts_used = n
        if config.method == "icl":
            history = _history(env.history_since_marker())
        else:
            history = _trace(env, config.trace_window)
        prompt = render_prompt(template, {
            "domain_desc": env.describe(),
            "current_state": env.observable_state(),
            "interaction_history": history,
        })
        plan = session.ask_parsed(log, "plan", prompt, "full_plan")
        if plan is None:
            continue
        env.mark_history()
        log.plan_actions = plan.actions
        log.plan_steps = session.execute(plan.actions, f"{n}:plan")


def _react_loop(session: _Session, prompts: PromptSet) -> None:
    env, config = session.env, session.config
    template = prompts.with_uncertainty(prompts.react_fewshot) if config.uncertainty_prompt else prompts.react_fewshot
    initial_state = env.observable_state()
    for n in range(1, config.max_attempts + 1):
        if session.finished():
            break
        log = AttemptLog(n)
        session.run.attempts.append(log)
        session.run.attempts_used = n
        env.mark_history()
        lines: list[tuple[str, str]] = []
        idle = 0
        while not session.finished() and idle < REACT_MAX_IDLE:
            prompt = render_prompt(template, {
                "domain_desc": env.describe(),
                "current_state": initial_state,
                "interaction_history": format_react_history(lines),
            })
            reply = session.ask(n, "act", [{"role": "user", "content": prompt}])
            line = next((ln.strip() for ln in reply.splitlines() if ln.strip()), "")
            line = line[1:].strip() if line.startswith(">") else line
            if line.lower() == "end":
                break
            if not line or line.lower().startswith("think:"):
                lines.append((line, REACT_THINK_REPLY))
                idle += 1
                continue
            idle = 0
            log.plan_actions.append(line)
            outcome = env.step(line, tag=f"{n}:act")
            log.plan_steps += 1
            lines.append((line, outcome.observation))


def run_baseline(env: Environment, backend: Backend, config: AgentConfig,
                 prompts: PromptSet | None = None) -> AgentRun:
    prompts = prompts or PromptSet.default()
    if config.method == "vanilla":
        if config.seek_enabled or config.extract_enabled:
            config = AgentConfig(**{**asdict(config), "seek_enabled": False, "extract_enabled": False})
        return run_infoseeker(env, backend, config, prompts)
    if config.method == "infoseeker":
        raise ValueError("use run_infoseeker for the infoseeker method")
    session = _Session(env, backend, config)
    try:
        if config.method == "react":
            _react_loop(session, prompts)
        else:
            _full_plan_loop(session, prompts)
    except BackendError as exc:
        session.run.errored, session.run.error = True, str(exc)
    return session.close()


def run_agent(env: Environment, backend: Backend, config: AgentConfig,
              prompts: PromptSet | None = None) -> AgentRun:
    if config.method == "infoseeker":
        return run_infoseeker(env, backend, config, prompts)
    return run_baseline(env, backend, config, prompts)
