"""Brute-force ground truth on the expanded normal form.

Nothing here reuses the payoff engine's enumeration: games are expanded to
one payoff tensor per agent and every expectation is a tensor contraction.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .payoff import PayoffJacobian, expected_payoff

EXPANSION_CAP = 10**6


class ExpansionCapError(RuntimeError):
    """The normal form of the game is too large to expand."""


def expand_normal_form(game, cap=EXPANSION_CAP):
    """Payoff tensors, one per agent, indexed by positions in action sets."""
    shape = tuple(len(aset) for aset in game.action_sets)
    size = math.prod(shape)
    if size > cap:
        raise ExpansionCapError(
            f"normal form has {size} profiles, cap is {cap}")
    tensors = [np.empty(shape) for _ in range(game.num_agents)]
    for idx in itertools.product(*(range(k) for k in shape)):
        profile = [aset[k] for aset, k in zip(game.action_sets, idx)]
        counts = np.bincount(profile, minlength=game.num_actions)
        for i, s in enumerate(profile):
            tensors[i][idx] = game.utility_full(s, counts)
    return tensors


def _contract(tensor, sigma, keep):
    """Contract every axis not in ``keep`` against the matching strategy."""
    n = tensor.ndim
    letters = [chr(ord("a") + j) for j in range(n)]
    operands = [tensor]
    subs = ["".join(letters)]
    for j in range(n):
        if j not in keep:
            operands.append(np.asarray(sigma[j], dtype=float))
            subs.append(letters[j])
    out = "".join(letters[j] for j in sorted(keep))
    return np.einsum(",".join(subs) + "->" + out, *operands)


def oracle_expected_payoffs(game, sigma, tensors=None):
    """Per-agent arrays of expected payoffs for each own action."""
    if tensors is None:
        tensors = expand_normal_form(game)
    return [_contract(t, sigma, {i}) for i, t in enumerate(tensors)]


def brute_jacobian(game, sigma, tensors=None):
    """Payoff Jacobian from full tensor contractions."""
    if tensors is None:
        tensors = expand_normal_form(game)
    m = game.num_strats
    mat = np.zeros((m, m))
    st = game.agent_starts
    for i, t in enumerate(tensors):
        for i2 in range(game.num_agents):
            if i2 == i:
                continue
            block = _contract(t, sigma, {i, i2})
            if i2 < i:
                block = block.T
            mat[st[i]:st[i] + t.shape[i], st[i2]:st[i2] + t.shape[i2]] = block
    return PayoffJacobian(mat, game.order, "brute")


@dataclass
class RegretReport:
    """Best-response gaps of a mixed profile."""

    best: list
    current: list
    regret: list
    eps: float

    @property
    def max_regret(self):
        return max(self.regret) if self.regret else 0.0

    @property
    def passed(self):
        return self.max_regret <= self.eps

    def to_dict(self):
        return {
            "agents": [{"best_response_value": b, "current_value": c,
                        "regret": r}
                       for b, c, r in zip(self.best, self.current,
                                          self.regret)],
            "max_regret": self.max_regret,
            "eps": self.eps,
            "passed": self.passed,
        }


def regret_report(sigma, values, eps):
    best, cur, reg = [], [], []
    for vec, v in zip(sigma, values):
        b = float(np.max(v))
        c = float(np.dot(vec, v))
        best.append(b)
        cur.append(c)
        reg.append(max(b - c, 0.0))
    return RegretReport(best, cur, reg, eps)


def verify_nash(game, sigma, eps=1e-6, cap=EXPANSION_CAP):
    """Regret of every agent at ``sigma``.

    Games whose normal form exceeds ``cap`` are evaluated with the payoff
    engine's count-vector convolution instead of tensor expansion.
    """
    sigma = [np.asarray(p, dtype=float) for p in sigma]
    try:
        values = oracle_expected_payoffs(game, sigma,
                                         expand_normal_form(game, cap))
    except ExpansionCapError:
        values = [np.array([expected_payoff(game, i, a, sigma, "distribution")
                            for a in aset])
                  for i, aset in enumerate(game.action_sets)]
    return regret_report(sigma, values, eps)
