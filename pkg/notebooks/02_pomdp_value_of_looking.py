"""
When is looking worth a step?
=============================

The tabular POMDP tools compute exact finite-horizon values. With a noisy
"listen" action the optimal first move flips from guessing to listening
as soon as the horizon leaves room to act on what was heard.
"""

# %%
import numpy as np

from seekbench.pomdp import DiscretePOMDP, belief_update, optimal_value

# States: tiger behind left, behind right, episode over. Opening a door ends
# the episode; only the safe door pays.
T = np.zeros((3, 3, 3))
T[:, 0, :] = np.eye(3)   # listening leaves the state alone
T[:, 1:, 2] = 1.0        # opening a door ends the episode
O = np.full((3, 3, 2), 0.5)
O[:2, 0, :] = [[0.85, 0.15], [0.15, 0.85]]
R = np.array([[0, 0, 1], [0, 1, 0], [0, 0, 0]], dtype=float)
tiger = DiscretePOMDP(T, O, R, 0.95, ("left", "right", "done"), ("listen", "open-left", "open-right"),
                      ("hear-left", "hear-right"))

# %%
b = np.array([0.5, 0.5, 0.0])
for h in range(1, 7):
    v, a = optimal_value(tiger, b, h)
    print(f"horizon {h}: value {v:.4f}, first action {tiger.actions[a]}")

# %%
# Two consistent observations sharpen the belief.
for _ in range(2):
    b = belief_update(tiger, b, 0, 0)
    print(np.round(b, 4))
