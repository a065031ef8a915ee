"""Exact tabular POMDP math: belief filtering, observation likelihoods and
finite-horizon optimal values by exhaustive expectimax.

Conventions: ``T[s, a, s']`` is the transition probability and
``O[s', a, o]`` the probability of observing ``o`` after arriving in ``s'``
via ``a``. Rewards ``R[s, a]`` are collected before the transition.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

STOCHASTIC_TOL = 1e-12
DEFAULT_HORIZON_CAP = 8
_TIE_TOL = 1e-12


class ImpossibleObservation(ValueError):
    """The observation has zero probability under the current belief and action."""


class HorizonTooLarge(ValueError):
    def __init__(self, horizon: int, cap: int) -> None:
        self.horizon, self.cap = horizon, cap
        super().__init__(f"horizon {horizon} exceeds the configured cap of {cap}")


@dataclass(frozen=True, eq=False)
class DiscretePOMDP:
    T: np.ndarray
    O: np.ndarray
    R: np.ndarray
    gamma: float
    states: tuple[str, ...] = ()
    actions: tuple[str, ...] = ()
    observations: tuple[str, ...] = ()
    binary_reward: bool = field(default=True, repr=False)

    def __post_init__(self) -> None:
        T = np.asarray(self.T, dtype=float)
        O = np.asarray(self.O, dtype=float)
        R = np.asarray(self.R, dtype=float)
        if T.ndim != 3 or T.shape[0] != T.shape[2]:
            raise ValueError(f"T must have shape (S, A, S), got {T.shape}")
        n_s, n_a, _ = T.shape
        if O.ndim != 3 or O.shape[:2] != (n_s, n_a):
            raise ValueError(f"O must have shape ({n_s}, {n_a}, Z), got {O.shape}")
        if R.shape != (n_s, n_a):
            raise ValueError(f"R must have shape ({n_s}, {n_a}), got {R.shape}")
        for name, arr in (("T", T), ("O", O)):
            if np.any(arr < 0) or not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} has negative or non-finite entries")
            worst = np.max(np.abs(arr.sum(axis=2) - 1.0))
            if worst > STOCHASTIC_TOL:
                raise ValueError(f"{name} rows must sum to 1 (max deviation {worst:.3g})")
        if not np.all(np.isfinite(R)):
            raise ValueError("R has non-finite entries")
        if self.binary_reward and not np.all((R == 0) | (R == 1)):
            raise ValueError("R must be binary (0/1)")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError(f"gamma must be in [0, 1), got {self.gamma}")
        names = {
            "states": (self.states, n_s, "s"),
            "actions": (self.actions, n_a, "a"),
            "observations": (self.observations, O.shape[2], "o"),
        }
        for attr, (given, n, prefix) in names.items():
            labels = tuple(given) or tuple(f"{prefix}{i}" for i in range(n))
            if len(labels) != n:
                raise ValueError(f"expected {n} {attr}, got {len(labels)}")
            object.__setattr__(self, attr, labels)
        for attr, arr in (("T", T), ("O", O), ("R", R)):
            arr.setflags(write=False)
            object.__setattr__(self, attr, arr)

    @property
    def n_states(self) -> int:
        return self.T.shape[0]

    @property
    def n_actions(self) -> int:
        return self.T.shape[1]

    @property
    def n_observations(self) -> int:
        return self.O.shape[2]

    def scaled(self, factor: float) -> "DiscretePOMDP":
        """Same model with rewards multiplied by ``factor`` (no binary check)."""
        return DiscretePOMDP(self.T, self.O, self.R * factor, self.gamma,
                             self.states, self.actions, self.observations, binary_reward=False)

    # -- serialization ---------------------------------------------------
    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "DiscretePOMDP":
        missing = [k for k in ("T", "O", "R", "gamma") if k not in data]
        if missing:
            raise ValueError(f"POMDP definition missing keys: {', '.join(missing)}")
        return cls(
            np.array(data["T"], dtype=float),
            np.array(data["O"], dtype=float),
            np.array(data["R"], dtype=float),
            float(data["gamma"]),
            tuple(data.get("states", ())),
            tuple(data.get("actions", ())),
            tuple(data.get("observations", ())),
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "states": list(self.states),
            "actions": list(self.actions),
            "observations": list(self.observations),
            "T": self.T.tolist(),
            "O": self.O.tolist(),
            "R": self.R.tolist(),
            "gamma": self.gamma,
        }


def load_pomdp(path: str | Path) -> DiscretePOMDP:
    return DiscretePOMDP.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def check_belief(pomdp: DiscretePOMDP, b: Sequence[float]) -> np.ndarray:
    arr = np.asarray(b, dtype=float)
    if arr.shape != (pomdp.n_states,):
        raise ValueError(f"belief must have length {pomdp.n_states}")
    if np.any(arr < 0) or abs(arr.sum() - 1.0) > STOCHASTIC_TOL:
        raise ValueError("belief must be a probability vector")
    return arr


def _joint(pomdp: DiscretePOMDP, b: np.ndarray, a: int) -> np.ndarray:
    # P(s', o | b, a) as an (S, Z) table
    predicted = b @ pomdp.T[:, a, :]
    return predicted[:, None] * pomdp.O[:, a, :]


def obs_likelihood(pomdp: DiscretePOMDP, b: Sequence[float], a: int, o: int) -> float:
    b = check_belief(pomdp, b)
    return float(_joint(pomdp, b, a)[:, o].sum())


def belief_update(pomdp: DiscretePOMDP, b: Sequence[float], a: int, o: int) -> np.ndarray:
    b = check_belief(pomdp, b)
    unnorm = _joint(pomdp, b, a)[:, o]
    total = unnorm.sum()
    if total <= 0.0:
        raise ImpossibleObservation(
            f"observation {pomdp.observations[o]!r} has zero probability after action {pomdp.actions[a]!r}"
        )
    return unnorm / total


def _values(pomdp: DiscretePOMDP, beliefs: np.ndarray, horizon: int) -> tuple[np.ndarray, np.ndarray]:
    """Optimal values and greedy actions for a batch of beliefs (n, S)."""
    n = beliefs.shape[0]
    if horizon == 0 or n == 0:
        return np.zeros(n), np.full(n, -1)
    immediate = beliefs @ pomdp.R                                   # (n, A)
    predicted = np.einsum("ns,sat->nat", beliefs, pomdp.T)          # (n, A, S')
    joint = predicted[..., None] * pomdp.O.transpose(1, 0, 2)[None]  # (n, A, S', Z)
    p_obs = joint.sum(axis=2)                                       # (n, A, Z)
    ni, ai, zi = np.nonzero(p_obs > 0)
    nxt = joint[ni, ai, :, zi] / p_obs[ni, ai, zi][:, None]
    future_v, _ = _values(pomdp, nxt, horizon - 1)
    future = np.zeros_like(p_obs)
    future[ni, ai, zi] = future_v
    q = immediate + pomdp.gamma * (p_obs * future).sum(axis=2)
    best = q.max(axis=1)
    # First action within tolerance of the max: ties go to the lowest index.
    arg = np.argmax(q >= best[:, None] - _TIE_TOL, axis=1)
    return best, arg


def optimal_value(
    pomdp: DiscretePOMDP, b: Sequence[float], horizon: int, cap: int = DEFAULT_HORIZON_CAP
) -> tuple[float, int | None]:
    """Finite-horizon optimal value at ``b`` and the maximizing first action.

    Exact expectimax over every action/observation branch with non-zero
    probability; cost grows as (|A||Z|)^horizon.
    """
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    if horizon > cap:
        raise HorizonTooLarge(horizon, cap)
    b = check_belief(pomdp, b)
    if horizon == 0:
        return 0.0, None
    values, actions = _values(pomdp, b[None, :], horizon)
    return float(values[0]), int(actions[0])


__all__ = [
    "DEFAULT_HORIZON_CAP", "DiscretePOMDP", "HorizonTooLarge", "ImpossibleObservation",
    "belief_update", "check_belief", "load_pomdp", "obs_likelihood", "optimal_value",
]
