"""How utility evaluations grow with the number of agents.

Compares the per-entry enumeration sizes of the projected method, the
count-based (partitioned) method and the symmetric composition walk on a
shared three-action game where each node sees itself and one other node.
"""
import math
import time

import numpy as np

from aggnash import ActionGraphGame, LinearUtility, jacobian_symmetric

NEIGHBORS = ((0, 1), (1, 2), (2, 0))


def shared_game(n, seed=0):
    rng = np.random.default_rng(seed)
    terms = [{a: rng.normal(size=n + 1) for a in nb} for nb in NEIGHBORS]
    return ActionGraphGame(n, ["a0", "a1", "a2"], [range(3)] * n, NEIGHBORS,
                           LinearUtility(terms))


I = 2
print(f"{'n':>5} {'projected':>12} {'counts':>8} {'symmetric total':>16} "
      f"{'seconds':>8}")
for n in (10, 20, 40, 80, 160):
    nbar = n - 2
    g = shared_game(n)
    t0 = time.perf_counter()
    J = jacobian_symmetric(g, np.full(3, 1 / 3))
    dt = time.perf_counter() - t0
    print(f"{n:5d} {float((I + 1) ** nbar):12.3e} "
          f"{math.comb(nbar + I, I):8d} {J.utility_evals:16d} {dt:8.3f}")
