"""Encoders and generators for common game families."""
from __future__ import annotations

import itertools

import numpy as np

from .game import (ActionGraphGame, LinearUtility, TableUtility,
                   reachable_counts)


def _clusters(sizes):
    starts = np.cumsum([0] + list(sizes[:-1])).tolist()
    return [list(range(st, st + k)) for st, k in zip(starts, sizes)]


def _cluster_game(sizes, parents, payoff_of):
    """Shared construction for normal-form and graphical encodings.

    Every agent owns a private cluster of nodes. ``parents[i]`` are the agents
    whose cluster feeds every node of agent i. ``payoff_of(i, k, choice)``
    gives agent i's payoff for own action k when each parent plays
    ``choice[p]``.
    """
    n = len(sizes)
    clusters = _clusters(sizes)
    actions = [f"p{i}a{k}" for i in range(n) for k in range(sizes[i])]
    neighbors = [None] * len(actions)
    tables = [None] * len(actions)
    for i in range(n):
        pars = sorted(parents[i])
        nbrs = [node for p in pars for node in clusters[p]]
        for k, node in enumerate(clusters[i]):
            neighbors[node] = nbrs
            table = {}
            for combo in itertools.product(*(range(sizes[p]) for p in pars)):
                key = []
                for p, c in zip(pars, combo):
                    onehot = [0] * sizes[p]
                    onehot[c] = 1
                    key.extend(onehot)
                table[tuple(key)] = float(payoff_of(i, k, dict(zip(pars, combo))))
            tables[node] = table
    return ActionGraphGame(n, actions, clusters, neighbors, TableUtility(tables))


def encode_normal_form(payoffs):
    """Encode a normal-form game as an action-graph game.

    Each agent-action pair becomes its own node and every node listens to
    every node of every other agent.

    Parameters
    ----------
    payoffs : sequence of array_like
        ``payoffs[i][s_1, ..., s_n]`` is agent i's payoff. All tensors must
        share one shape with one axis per agent.
    """
    payoffs = [np.asarray(p, dtype=float) for p in payoffs]
    n = len(payoffs)
    if n == 0:
        raise ValueError("need at least one agent")
    shape = payoffs[0].shape
    if len(shape) != n or any(p.shape != shape for p in payoffs):
        raise ValueError(
            f"payoff tensors must all have {n} axes and equal shape")

    def payoff_of(i, k, choice):
        idx = tuple(k if j == i else choice[j] for j in range(n))
        return payoffs[i][idx]

    parents = [[j for j in range(n) if j != i] for i in range(n)]
    return _cluster_game(list(shape), parents, payoff_of)


def encode_graphical_game(parents, payoffs):
    """Encode a graphical game as an action-graph game.

    Parameters
    ----------
    parents : sequence of sequences of int
        ``parents[i]`` lists the agents whose actions affect agent i.
    payoffs : sequence of array_like
        ``payoffs[i]`` has axes ``(own action, *parents[i])`` in the order
        given.
    """
    payoffs = [np.asarray(p, dtype=float) for p in payoffs]
    n = len(payoffs)
    if len(parents) != n:
        raise ValueError("one parent list per agent required")
    sizes = [p.shape[0] if p.ndim else 0 for p in payoffs]
    for i, (pars, tab) in enumerate(zip(parents, payoffs)):
        if i in pars:
            raise ValueError(f"agent {i} lists itself as a parent")
        expect = (sizes[i],) + tuple(sizes[p] for p in pars)
        if tab.shape != expect:
            raise ValueError(
                f"agent {i}: payoff table shape {tab.shape}, family needs "
                f"{expect}")

    def payoff_of(i, k, choice):
        return payoffs[i][(k,) + tuple(choice[p] for p in parents[i])]

    return _cluster_game(sizes, parents, payoff_of)


def generate_ice_cream(n, locations, chocolate=None, shared=False,
                       w_c=1.0, w_v=1.0):
    """Ice cream vendors on a beach.

    Each location holds a chocolate node and a vanilla node. A vendor is
    hurt by same-flavor vendors within one location and helped by
    other-flavor vendors there:

        u(choc@l, D) = sum over l' near l of
                       w_v * D(van@l') - w_c * (D(choc@l') - [l' == l])

    and symmetrically for vanilla. Actions are ordered ``C0..C{L-1}``
    followed by ``V0..V{L-1}``.

    Parameters
    ----------
    n : int
        Number of vendors.
    locations : int
    chocolate : int, optional
        Number of chocolate vendors (the first agents); the rest sell
        vanilla. Defaults to ``n // 2``. Ignored when ``shared``.
    shared : bool
        Every vendor may choose any flavor and location.
    """
    L = int(locations)
    if L < 1:
        raise ValueError("need at least one location")
    if chocolate is None:
        chocolate = n // 2
    if not shared and not 0 <= chocolate <= n:
        raise ValueError("chocolate count must lie in [0, n]")
    choc = list(range(L))
    van = list(range(L, 2 * L))
    actions = [f"C{l}" for l in range(L)] + [f"V{l}" for l in range(L)]
    k = np.arange(n + 1, dtype=float)
    neighbors, terms = [], []
    for node in range(2 * L):
        loc, is_choc = node % L, node < L
        window = range(max(loc - 1, 0), min(loc + 1, L - 1) + 1)
        nbrs = sorted([choc[l] for l in window] + [van[l] for l in window])
        same, other = (choc, van) if is_choc else (van, choc)
        w_same, w_other = (w_c, w_v) if is_choc else (w_v, w_c)
        t = {}
        for l in window:
            t[same[l]] = -w_same * (k - (l == loc))
            t[other[l]] = w_other * k
        neighbors.append(nbrs)
        terms.append(t)
    if shared:
        action_sets = [list(range(2 * L))] * n
    else:
        action_sets = [choc] * chocolate + [van] * (n - chocolate)
    return ActionGraphGame(n, actions, action_sets, neighbors,
                           LinearUtility(terms))


def rock_paper_scissors(n=2):
    """Rock-paper-scissors with one shared node per action.

    Each player scores the number of opponents it beats minus the number it
    loses to. Every action listens to all three nodes.
    """
    beats = {0: 2, 1: 0, 2: 1}  # R>S, P>R, S>P
    nbrs = [0, 1, 2]
    tables = []
    for s in range(3):
        table = {}
        for c in itertools.product(range(n + 1), repeat=3):
            if sum(c) != n or c[s] < 1:
                continue
            loser = beats[s]
            winner = next(a for a, b in beats.items() if b == s)
            table[c] = float(c[loser] - c[winner])
        tables.append(table)
    return ActionGraphGame(n, ["R", "P", "S"], [[0, 1, 2]] * n, [nbrs] * 3,
                           TableUtility(tables))


def matching_pennies():
    """Matching pennies; agent 0 wins on a match."""
    a = np.array([[1.0, -1.0], [-1.0, 1.0]])
    return encode_normal_form([a, -a])


def coordination_2x2(match=1.0):
    """Both agents earn ``match`` when they pick the same action, else 0."""
    a = np.array([[match, 0.0], [0.0, match]])
    return encode_normal_form([a, a])


def shared_coordination(n, num_actions=3):
    """Symmetric coordination game on shared action nodes.

    A player earns 1 when its action is (weakly) the most popular among the
    other players, 0 otherwise.
    """
    nbrs = list(range(num_actions))
    tables = []
    for s in range(num_actions):
        table = {}
        for c in itertools.product(range(n + 1), repeat=num_actions):
            if sum(c) != n or c[s] < 1:
                continue
            others = list(c)
            others[s] -= 1
            table[c] = 1.0 if others[s] == max(others) else 0.0
        tables.append(table)
    return ActionGraphGame(n, [f"a{s}" for s in range(num_actions)],
                           [nbrs] * n, [nbrs] * num_actions,
                           TableUtility(tables))


def random_game(num_agents, num_actions, max_degree, seed=None, *,
                shared=False, kind="table", exact_degree=False):
    """Random action-graph game for testing and benchmarks.

    Parameters
    ----------
    num_agents, num_actions : int
    max_degree : int
        Upper bound on every neighbor list length.
    seed : int or numpy Generator, optional
    shared : bool
        Give every agent the full action set.
    kind : {'table', 'linear'}
    exact_degree : bool
        Make every neighbor list exactly ``min(max_degree, num_actions)``
        long.
    """
    rng = np.random.default_rng(seed)
    n, S = num_agents, num_actions
    if shared:
        action_sets = [list(range(S))] * n
    else:
        # each action gets an owner, then agents pick up random extras
        members = [set() for _ in range(n)]
        for a in range(S):
            members[rng.integers(n)].add(a)
        for i in range(n):
            extra = rng.random(S) < 0.4
            members[i].update(np.flatnonzero(extra).tolist())
            if not members[i]:
                members[i].add(int(rng.integers(S)))
        action_sets = [sorted(m) for m in members]
    deg_cap = min(max_degree, S)
    neighbors = []
    for _ in range(S):
        d = deg_cap if exact_degree else int(rng.integers(0, deg_cap + 1))
        neighbors.append(sorted(rng.choice(S, size=d, replace=False).tolist()))
    names = [f"a{s}" for s in range(S)]
    if kind == "linear":
        terms = [{a: np.round(rng.normal(size=n + 1), 6) for a in nbrs}
                 for nbrs in neighbors]
        return ActionGraphGame(n, names, action_sets, neighbors,
                               LinearUtility(terms))
    if kind != "table":
        raise ValueError(f"unknown utility kind {kind!r}")
    skeleton = ActionGraphGame(n, names, action_sets, neighbors,
                               TableUtility([{}] * S))
    tables = []
    for s in range(S):
        keys = sorted(reachable_counts(skeleton, s))
        vals = np.round(rng.normal(size=len(keys)), 6)
        tables.append(dict(zip(keys, vals.tolist())))
    return ActionGraphGame(n, names, action_sets, neighbors,
                           TableUtility(tables))
