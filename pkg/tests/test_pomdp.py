from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seekbench.pomdp import (
    DiscretePOMDP, HorizonTooLarge, ImpossibleObservation, belief_update, load_pomdp, obs_likelihood,
    optimal_value,
)

from oracles import bayes_by_enumeration, value_by_enumeration


def tiger(accuracy: float = 0.85) -> DiscretePOMDP:
    # states: tiger-left, tiger-right; actions: listen, open-left, open-right
    T = np.zeros((2, 3, 2))
    T[:, 0, :] = np.eye(2)
    T[:, 1:, :] = 0.5
    O = np.full((2, 3, 2), 0.5)
    O[:, 0, :] = [[accuracy, 1 - accuracy], [1 - accuracy, accuracy]]
    R = np.array([[0, 0, 1], [0, 1, 0]], dtype=float)  # opening the safe door pays 1
    return DiscretePOMDP(T, O, R, 0.95, ("left", "right"), ("listen", "open-left", "open-right"),
                         ("hear-left", "hear-right"))


def random_pomdp(rng: np.random.Generator, n_s: int, n_a: int, n_z: int, sparse: bool = True) -> DiscretePOMDP:
    T = rng.random((n_s, n_a, n_s)) ** 3
    O = rng.random((n_s, n_a, n_z)) ** 3
    if sparse:
        T[T < 0.2] = 0
        O[O < 0.2] = 0
        T[..., 0] += 1e-3
        O[..., 0] += 1e-3
    T /= T.sum(-1, keepdims=True)
    O /= O.sum(-1, keepdims=True)
    R = (rng.random((n_s, n_a)) < 0.3).astype(float)
    return DiscretePOMDP(T, O, R, float(rng.uniform(0, 0.99)))


def random_belief(rng, n):
    b = rng.random(n)
    return b / b.sum()


def test_tiger_examples():
    m = tiger()
    b = [0.5, 0.5]
    assert obs_likelihood(m, b, 0, 0) == pytest.approx(0.5)
    assert belief_update(m, b, 0, 0) == pytest.approx([0.85, 0.15])
    post, total = bayes_by_enumeration(m.T.tolist(), m.O.tolist(), b, 0, 0)
    assert total == pytest.approx(0.5) and post == pytest.approx([0.85, 0.15])


def test_trivial_likelihoods():
    n = 3
    T = np.tile(np.eye(n)[:, None, :], (1, 2, 1))
    O = np.full((n, 2, 4), 0.25)
    m = DiscretePOMDP(T, O, np.zeros((n, 2)), 0.9)
    b = [0.2, 0.3, 0.5]
    assert all(obs_likelihood(m, b, 1, o) == pytest.approx(0.25) for o in range(4))
    assert belief_update(m, b, 1, 2) == pytest.approx(b)
    O = np.zeros((n, 2, 3))
    O[np.arange(n), :, np.arange(n)] = 1.0
    m = DiscretePOMDP(T, O, np.zeros((n, 2)), 0.9)
    assert obs_likelihood(m, [0, 1, 0], 0, 1) == 1.0


def test_impossible_observation():
    T = np.tile(np.eye(2)[:, None, :], (1, 1, 1))
    O = np.zeros((2, 1, 2))
    O[:, :, 0] = 1.0
    m = DiscretePOMDP(T, O, np.zeros((2, 1)), 0.5)
    with pytest.raises(ImpossibleObservation):
        belief_update(m, [0.5, 0.5], 0, 1)


def test_value_basics():
    m = tiger()
    assert optimal_value(m, [0.5, 0.5], 0) == (0.0, None)
    b = [0.3, 0.7]
    v1, a1 = optimal_value(m, b, 1)
    assert v1 == pytest.approx(max(np.array(b) @ m.R))
    assert a1 == 1
    zero = DiscretePOMDP(m.T, m.O, np.zeros_like(m.R), m.gamma)
    assert optimal_value(zero, b, 4) == (0.0, 0)


def test_tiger_depth3_matches_enumerator():
    m = tiger()
    v, a = optimal_value(m, [0.5, 0.5], 3)
    ov, oa = value_by_enumeration(m.T.tolist(), m.O.tolist(), m.R.tolist(), m.gamma, [0.5, 0.5], 3)
    assert v == pytest.approx(ov, abs=1e-9)
    assert a == oa


def test_horizon_cap():
    m = tiger()
    with pytest.raises(HorizonTooLarge, match="8"):
        optimal_value(m, [0.5, 0.5], 9)
    with pytest.raises(ValueError):
        optimal_value(m, [0.5, 0.5], -1)


def test_validation():
    m = tiger()
    with pytest.raises(ValueError, match="T"):
        DiscretePOMDP(m.T * 0.5, m.O, m.R, 0.9)
    with pytest.raises(ValueError, match="O"):
        DiscretePOMDP(m.T, m.O * 2, m.R, 0.9)
    with pytest.raises(ValueError, match="binary"):
        DiscretePOMDP(m.T, m.O, m.R * 2, 0.9)
    with pytest.raises(ValueError, match="gamma"):
        DiscretePOMDP(m.T, m.O, m.R, 1.0)
    with pytest.raises(ValueError):
        obs_likelihood(m, [0.6, 0.6], 0, 0)


def test_json_roundtrip(tmp_path):
    m = tiger()
    path = tmp_path / "tiger.json"
    path.write_text(json.dumps(m.to_dict()))
    back = load_pomdp(path)
    assert back.actions == m.actions and np.array_equal(back.T, m.T)
    bad = m.to_dict()
    bad["T"][0][0] = [0.7, 0.7]
    path.write_text(json.dumps(bad))
    with pytest.raises(ValueError):
        load_pomdp(path)
    del bad["gamma"]
    with pytest.raises(ValueError, match="gamma"):
        DiscretePOMDP.from_dict(bad)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5), st.integers(1, 5), st.integers(1, 5))
def test_bayes_consistency(seed, n_s, n_a, n_z):
    rng = np.random.default_rng(seed)
    m = random_pomdp(rng, n_s, n_a, n_z)
    b = random_belief(rng, n_s)
    for a in range(n_a):
        for o in range(n_z):
            post, total = bayes_by_enumeration(m.T.tolist(), m.O.tolist(), b.tolist(), a, o)
            assert obs_likelihood(m, b, a, o) == pytest.approx(total, abs=1e-12)
            if total == 0:
                with pytest.raises(ImpossibleObservation):
                    belief_update(m, b, a, o)
                continue
            upd = belief_update(m, b, a, o)
            assert np.max(np.abs(upd - post)) <= 1e-9
            assert abs(upd.sum() - 1.0) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_value_monotone_in_horizon(seed, n):
    rng = np.random.default_rng(seed)
    m = random_pomdp(rng, n, 2, 2)
    b = random_belief(rng, n)
    values = [optimal_value(m, b, h)[0] for h in range(5)]
    assert all(x <= y + 1e-12 for x, y in zip(values, values[1:]))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.1, 100))
def test_argmax_invariant_under_reward_scaling(seed, scale):
    rng = np.random.default_rng(seed)
    m = random_pomdp(rng, 3, 3, 2)
    b = random_belief(rng, 3)
    v, a = optimal_value(m, b, 3)
    sv, sa = optimal_value(m.scaled(scale), b, 3)
    assert sv == pytest.approx(v * scale, rel=1e-9, abs=1e-12)
    assert sa == a
