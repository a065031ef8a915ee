"""
Probing a hidden actuation offset
=================================

A perturbed arm task shifts every commanded target by a constant offset.
Commanding the goal directly misses; one probe move plus a Check measures
the shift, and the corrected command lands.
"""

# %%
from seekbench.envs import TaskSpec, make_env

env = make_env(TaskSpec("arm", "perturbed", params={"offset": (0.5, 0.5)}))
print(env.describe())

# %%
# Naive attempt: ask for the goal [1.0, 2.0] via a safe waypoint.
for action in ["Move 1.5 0", "Move 1 2", "Check"]:
    print(f"> {action}\n{env.step(action).observation}")
print("success:", env.success)

# %%
# Fresh episode. Probe once, read the gripper, subtract the difference.
env = make_env(TaskSpec("arm", "perturbed", params={"offset": (0.5, 0.5)}))
print(env.step("Move 1 -0.5").observation)
check = env.step("Check").observation
print(check)

from seekbench.policies.arm import config_from_check  # noqa: E402

_, gripper = config_from_check(check)
offset = (round(gripper[0] - 1.0, 2), round(gripper[1] + 0.5, 2))
print("measured offset:", offset)
print(env.step(f"Move {1.0 - offset[0]} {2.0 - offset[1]}").observation, "| success:", env.success)

# %%
# The same exchange through the agent loop with a scripted backend.
import json  # noqa: E402

from seekbench.agent import AgentConfig, ScriptedBackend, run_agent  # noqa: E402

replies = [
    json.dumps({"Reasoning": "probe", "Steps": [{"Goal": "measure", "Action Plan": ["Move 1 -0.5", "Check"]}]}),
    json.dumps({"Information": "Commands land 0.5 right and 0.5 up."}),
    json.dumps({"Reasoning": "compensate", "Solution Plan": ["Move 0.5 1.5", "Check"]}),
]
env = make_env(TaskSpec("arm", "perturbed", params={"offset": (0.5, 0.5)}))
run = run_agent(env, ScriptedBackend(replies), AgentConfig(max_attempts=3))
print(f"success={run.success} steps={run.steps_used} attempts={run.attempts_used}")
for e in env.transcript.entries:
    print(f"[{e.tag}] {e.action} -> {e.observation}")
