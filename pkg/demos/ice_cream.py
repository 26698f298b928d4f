"""Ice cream vendors: solve a small beach and read off who sells what.

Run with ``python3 demos/ice_cream.py``.
"""
import time

import numpy as np

from aggnash import generate_ice_cream, solve, verify_nash

# three vendors, four locations, the first two sell chocolate
game = generate_ice_cream(3, 4, 2)
print(f"{game.num_agents} vendors, {len(game.actions)} action nodes, "
      f"max in-degree {game.max_in_degree}")

t0 = time.perf_counter()
result = solve(game)
print(f"path followed in {result.steps} steps, {time.perf_counter() - t0:.2f} s")

for i, (aset, p) in enumerate(zip(game.action_sets, result.sigma)):
    played = ", ".join(f"{game.actions[a]}={x:.3f}"
                       for a, x in zip(aset, p) if x > 1e-9)
    print(f"vendor {i}: {played}")

report = verify_nash(game, result.sigma)
print(f"max regret {report.max_regret:.2e}")

# the shared-flavor version is symmetric, so one strategy covers everyone
shared = generate_ice_cream(4, 2, shared=True)
res = solve(shared, symmetric=True)
print("shared beach, common strategy:",
      np.array2string(res.sigma[0], precision=4))
print(f"max regret {verify_nash(shared, res.sigma).max_regret:.2e}")
