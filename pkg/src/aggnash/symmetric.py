"""Payoff Jacobian of symmetric action-graph games under symmetric play.

When every agent has the same action set and plays the same mixed strategy,
the Jacobian no longer depends on agent identities and collapses to an
``|S| x |S|`` matrix. Each entry is a sum over projected count vectors of the
remaining agents, weighted by multinomial probabilities. The count vectors
are visited along a Gray-code walk so that each probability follows from the
previous one by a constant-time ratio, and linear utilities are updated the
same way.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .compositions import CompositionWalk
from .game import UtilityLookupError, check_profile, project_mixed_strategy
from .payoff import linear_utility_shift

UNDERFLOW = 1e-300
RESYNC_EVERY = 10_000


class AsymmetricGameError(ValueError):
    """The game or profile is not symmetric."""


def class_size(counts):
    """Number of pure profiles realizing ``counts`` (multinomial coefficient).

    Exact integer arithmetic.
    """
    counts = [int(c) for c in counts]
    out = math.factorial(sum(counts))
    for c in counts:
        out //= math.factorial(c)
    return out


def symmetric_profile_prob(q, counts):
    """Probability of one pure profile with the given counts."""
    p = 1.0
    for qa, c in zip(q, counts):
        if c:
            p *= qa ** c
    return p


def _log_distribution_prob(q, counts):
    logp = math.lgamma(sum(counts) + 1)
    for qa, c in zip(q, counts):
        if c:
            if qa <= 0:
                return -math.inf
            logp += c * math.log(qa) - math.lgamma(c + 1)
    return logp


def symmetric_distribution_prob(q, counts):
    """Probability that agents sharing strategy ``q`` land on ``counts``."""
    p = symmetric_profile_prob(q, counts)
    if p == 0.0:
        return 0.0 if any(c and qa == 0 for qa, c in zip(q, counts)) \
            else math.exp(_log_distribution_prob(q, counts))
    try:
        return float(class_size(counts)) * p
    except OverflowError:
        return math.exp(_log_distribution_prob(q, counts))


def distribution_prob_step(prob, q, counts, move):
    """Probability after one agent moves from node ``a`` to ``a2``.

    ``prob`` is the probability of ``counts``, the distribution before the
    move.

    Raises
    ------
    ZeroDivisionError
        When ``q[a]`` is zero; recompute directly instead.
    """
    a, a2 = move
    if counts[a] < 1:
        raise ValueError(f"node {a} is empty")
    if a == a2:
        return prob
    if q[a] == 0:
        raise ZeroDivisionError("source node has zero probability")
    return prob * (q[a2] * counts[a]) / (q[a] * (counts[a2] + 1))


@dataclass
class SymmetricJacobian:
    """Jacobian over actions for a shared mixed strategy.

    ``matrix[r, c]`` is the expected payoff of an agent playing the r-th
    action of the shared action set while one other agent plays the c-th and
    everybody else mixes with ``sigma``.
    """

    matrix: np.ndarray
    sigma: np.ndarray
    actions: tuple
    utility_evals: int = 0
    prob_evals: int = 0
    step_updates: int = 0
    row_evals: tuple = ()

    def to_dict(self):
        return {
            "m": int(self.matrix.shape[0]),
            "order": [[None, int(a)] for a in self.actions],
            "rows": self.matrix.tolist(),
            "method": "symmetric",
            "utility_evals": int(self.utility_evals),
            "prob_evals": int(self.prob_evals),
            "note": "rows and columns are actions of the shared action set, "
                    "not (agent, action) pairs",
        }


def _shared_strategy(game, sigma):
    if not game.is_symmetric:
        raise AsymmetricGameError("agents do not share one action set")
    aset = game.action_sets[0]
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim == 2:
        if not np.all(sigma == sigma[0]):
            raise AsymmetricGameError("agents play different strategies")
        sigma = sigma[0]
    check_profile(game, [sigma] * game.num_agents)
    return aset, sigma


class _WalkSum:
    """Accumulate ``sum_D u(s, D + pins) Pr(D)`` along a composition walk."""

    def __init__(self, game, s, q, pins_list):
        self.game, self.s, self.q = game, s, q
        self.view = game.view(s)
        self.pins_list = pins_list
        self.linear = game.utility.kind == "linear"
        self.utility_evals = self.prob_evals = self.step_updates = 0

    def _direct_prob(self, counts):
        self.prob_evals += 1
        return symmetric_distribution_prob(self.q, counts)

    def _util(self, counts, pins):
        adj = list(counts)
        for nd in pins:
            adj[nd] += 1
        self.utility_evals += 1
        try:
            val = self.game.utility.value(self.s, tuple(adj[:self.view.sink]))
        except UtilityLookupError:
            # unreachable counts only arise with zero probability
            if not any(c and qa == 0 for qa, c in zip(self.q, counts)):
                raise
            val = 0.0
        return val, adj

    def run(self, total):
        q = self.q
        walk = CompositionWalk(total, self.view.num_nodes)
        counts = list(walk.current)
        prob = self._direct_prob(counts)
        since = 0
        vals, adjs = zip(*(self._util(counts, pins) for pins in self.pins_list))
        vals, adjs = list(vals), list(adjs)
        acc = [v * prob for v in vals]
        while True:
            move = walk.next_move()
            if move is None:
                break
            prev = counts
            counts = list(walk.current)
            since += 1
            if prob > 0 and q[move[0]] > 0 and since < RESYNC_EVERY:
                prob = distribution_prob_step(prob, q, prev, move)
                self.step_updates += 1
                if prob < UNDERFLOW:
                    prob = self._direct_prob(counts)
                    since = 0
            else:
                prob = self._direct_prob(counts)
                since = 0
            for c, pins in enumerate(self.pins_list):
                if self.linear:
                    vals[c] = linear_utility_shift(
                        self.game, self.s, vals[c], adjs[c], move)
                    adj = adjs[c]
                    adj[move[0]] -= 1
                    adj[move[1]] += 1
                    self.utility_evals += 1
                else:
                    vals[c], adjs[c] = self._util(counts, pins)
                acc[c] += vals[c] * prob
        return acc


def jacobian_symmetric(game, sigma):
    """Symmetric payoff Jacobian.

    Parameters
    ----------
    game : ActionGraphGame
        Every agent must have the same action set.
    sigma : array_like
        Shared mixed strategy aligned with the common action set (or a full
        profile whose rows are all equal).

    Returns
    -------
    SymmetricJacobian
    """
    aset, sigma = _shared_strategy(game, sigma)
    n = game.num_agents
    k = len(aset)
    mat = np.zeros((k, k))
    ue = pe = su = 0
    row_evals = []
    if n < 2:
        return SymmetricJacobian(mat, sigma, aset, row_evals=(0,) * k)
    for r, s in enumerate(aset):
        view = game.view(s)
        q = project_mixed_strategy(view, aset, sigma)
        own = view.index[s]
        pins = [(own, view.index[a]) for a in aset]
        ws = _WalkSum(game, s, q, pins)
        mat[r] = ws.run(n - 2)
        ue += ws.utility_evals
        pe += ws.prob_evals
        su += ws.step_updates
        row_evals.append(ws.utility_evals)
    return SymmetricJacobian(mat, sigma, aset, ue, pe, su, tuple(row_evals))


def symmetric_expected_payoffs(game, sigma):
    """Expected payoff of each shared action when all others play ``sigma``."""
    aset, sigma = _shared_strategy(game, sigma)
    out = np.zeros(len(aset))
    for r, s in enumerate(aset):
        view = game.view(s)
        q = project_mixed_strategy(view, aset, sigma)
        ws = _WalkSum(game, s, q, [(view.index[s],)])
        out[r] = ws.run(game.num_agents - 1)[0]
    return out
