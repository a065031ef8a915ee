"""Independent reference computations, written without the library code."""

from __future__ import annotations

import cmath
import itertools
import math


def fk_complex(theta0: float, theta1: float, l1: float = 2.0, l2: float = 1.0):
    j = l1 * cmath.exp(1j * theta0)
    g = j + l2 * cmath.exp(1j * (theta0 + theta1))
    return (j.real, j.imag), (g.real, g.imag)


def sampled_segment_distance(p, q, c, n: int = 100_000) -> float:
    best = math.inf
    for k in range(n + 1):
        t = k / n
        x = p[0] + t * (q[0] - p[0])
        y = p[1] + t * (q[1] - p[1])
        best = min(best, math.hypot(x - c[0], y - c[1]))
    return best


def bayes_by_enumeration(T, O, b, a, o):
    """Posterior over s' from the full joint P(s, s', o) with plain loops."""
    n = len(b)
    joint = [[b[s] * T[s][a][s2] * O[s2][a][o] for s2 in range(n)] for s in range(n)]
    marg = [sum(joint[s][s2] for s in range(n)) for s2 in range(n)]
    total = sum(marg)
    if total == 0:
        return None, 0.0
    return [m / total for m in marg], total


def value_by_enumeration(T, O, R, gamma, b, horizon):
    """Expectimax on unnormalized belief weights.

    V_h(w) is homogeneous of degree one in w, so the recursion never needs
    to divide by the observation probability.
    """
    n_s = len(T)
    n_a = len(T[0])
    n_z = len(O[0][0])

    def v(w, h):
        if h == 0:
            return 0.0, None
        best, arg = -math.inf, None
        for a in range(n_a):
            q = sum(w[s] * R[s][a] for s in range(n_s))
            for o in range(n_z):
                w2 = [sum(w[s] * T[s][a][s2] for s in range(n_s)) * O[s2][a][o] for s2 in range(n_s)]
                if sum(w2) > 0:
                    q += gamma * v(w2, h - 1)[0]
            if q > best + 1e-12:
                best, arg = q, a
        return best, arg

    return v(list(b), horizon)


def brute_multisets(colors, max_units):
    for n in range(max_units + 1):
        yield from itertools.combinations_with_replacement(colors, n)
