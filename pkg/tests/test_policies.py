from __future__ import annotations

import pytest

from seekbench.envs import TASKS, TaskSpec, make_env
from seekbench.policies import make_policy, run_policy
from seekbench.policies.arm import estimate_offset, parse_task
from seekbench.policies.blocks import parse_state, plan_blocks, parse_goal
from seekbench.policies.color import learned_labels

SEEDS = range(20)


@pytest.mark.parametrize("family,variant,size", TASKS)
def test_seeker_solves_every_variant(family, variant, size):
    for seed in SEEDS:
        env = make_env(TaskSpec(family, variant, seed=seed, size=size))
        run_policy(env, make_policy(family))
        assert env.success, (family, variant, size, seed)
        assert env.steps_used <= 40


@pytest.mark.parametrize("family,variant,size,expected", [
    ("arm", "basic", None, 20), ("arm", "perturbed", None, 0),
    ("nav", "basic", None, 20), ("nav", "perturbed", None, 0),
    ("blocks", "perturbed", "single", 0),
])
def test_naive_discrimination(family, variant, size, expected):
    wins = 0
    for seed in SEEDS:
        env = make_env(TaskSpec(family, variant, seed=seed, size=size))
        policy = make_policy(family, "naive")
        for action in policy.plan(env.describe(), []):
            if env.done:
                break
            env.step(action)
        wins += env.success
    assert wins == expected


def test_arm_helpers():
    env = make_env(TaskSpec("arm", "basic"))
    target, obstacles = parse_task(env.describe())
    assert target == env.target and obstacles == env.obstacles
    history = [("Move 2 0", "Success!"),
               ("Check", "Joint positions: 'Joint 0': [0.00, 0.00] 'Joint 1': [1.50, 1.20] 'Gripper': [2.50, 0.50]")]
    assert estimate_offset(history) == (0.5, 0.5)
    assert estimate_offset(history[:1]) is None


def test_color_label_learning():
    env = make_env(TaskSpec("color", "wronglabel", seed=0))
    history = [(a, env.step(a).observation) for a in ("Clean A", "Add red to A", "Check A")]
    assert learned_labels(history) == {"red": env.tubes["red"]}


def test_blocks_planner_on_hand_built_state():
    env = make_env(TaskSpec("blocks", "basic", size="single", params={
        "stacks": [["red", "blue"], ["green"], []], "inventory": None, "goal": [["blue", "green", "red"]]}))
    state = parse_state(env.check())
    goal = parse_goal(env.describe())
    assert goal == [["blue", "green", "red"]]
    for action in plan_blocks(state, goal):
        env.step(action)
    assert env.success
