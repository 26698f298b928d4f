"""Follow the homotopy path for matching pennies and print its trace.

The bonus starts both players on heads. As the bonus fades the path bends
toward the unique mixed equilibrium.
"""
import numpy as np

from aggnash import matching_pennies, retract, solve

game = matching_pennies()
res = solve(game, [0, 2])

print(f"{'step':>4} {'lambda':>9} {'|F|':>9} {'h':>8}")
path = zip(res.lambda_trace, res.residual_trace, res.step_trace)
for k, (lam, r, h) in enumerate(path):
    if k % max(1, res.steps // 15) and k != res.steps:
        continue
    print(f"{k:4d} {lam:9.5f} {r:9.1e} {h:8.1e}")

sigma = retract(res.w, game.action_sets)
print("equilibrium:", [np.round(p, 6).tolist() for p in sigma])
