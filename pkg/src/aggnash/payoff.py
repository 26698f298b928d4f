"""Expected payoffs and payoff Jacobians of action-graph games.

The Jacobian entry for row ``(i, s_i)`` and column ``(i', s_i')`` is the
expected payoff of agent i playing ``s_i`` when agent i' is pinned to
``s_i'`` and all remaining agents mix according to the profile. Three
methods are provided, all producing the same numbers:

``naive``
    Sum over every pure profile of the remaining agents on the full graph.
``projected``
    Sum over pure profiles of the projected graph of ``s_i``, where all
    non-neighbors of ``s_i`` collapse into one sink node.
``partitioned``
    As ``projected``, but profiles are grouped by the distribution of counts
    they induce so the utility is evaluated once per distinct distribution.

Entries whose column action lies outside the row action's neighborhood are
equal within an (i, s_i, i') block; the projected and partitioned methods
compute one representative of that group and copy it with
:func:`share_entries`.
"""
from __future__ import annotations

import itertools
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .game import Distribution

NAIVE_CAP = 10**7
METHODS = ("naive", "projected", "partitioned")


class EnumerationCapError(RuntimeError):
    """The requested enumeration exceeds the configured profile cap."""


@dataclass
class PayoffJacobian:
    """Dense Jacobian of expected payoffs over strategy coordinates.

    Attributes
    ----------
    matrix : ndarray, shape (m, m)
    order : tuple of (agent, action) pairs labelling rows and columns
    method : str
    utility_evals : int
        Total number of utility values produced.
    prob_evals : int
        Number of profile probabilities computed as a full product.
    swap_updates : int
        Number of profile probabilities obtained by swapping two agents.
    entry_evals : ndarray of int, shape (m, m)
        Utility evaluations spent on each entry; zero for copied entries.
    """

    matrix: np.ndarray
    order: tuple
    method: str
    utility_evals: int = 0
    prob_evals: int = 0
    swap_updates: int = 0
    entry_evals: np.ndarray = field(default=None, repr=False)

    @property
    def m(self):
        return self.matrix.shape[0]

    def to_dict(self):
        return {
            "m": int(self.m),
            "order": [[int(i), int(a)] for i, a in self.order],
            "rows": self.matrix.tolist(),
            "method": self.method,
            "utility_evals": int(self.utility_evals),
            "prob_evals": int(self.prob_evals),
        }


def count_projected_distributions(nbar, k):
    """Number of ways to spread ``nbar`` agents over ``k`` nodes."""
    if nbar < 0 or k < 1:
        raise ValueError("need nbar >= 0 and k >= 1")
    count = math.comb(nbar + k - 1, k - 1)
    if count > sys.maxsize:
        raise OverflowError(
            f"C({nbar + k - 1}, {k - 1}) does not fit in a machine integer")
    return count


def swap_probability(prob, sigma_j, sigma_k, a_j, a_k):
    """Probability of a profile after agents j and k trade actions.

    ``prob`` is the probability of the profile where j plays ``a_j`` and k
    plays ``a_k``; ``sigma_j`` and ``sigma_k`` are indexable by action.

    Raises
    ------
    ZeroDivisionError
        If j's or k's current action has zero probability. Callers fall back
        to a direct product.
    """
    den = sigma_j[a_j] * sigma_k[a_k]
    if den == 0:
        raise ZeroDivisionError("swap update needs positive probabilities")
    return prob * (sigma_k[a_j] * sigma_j[a_k]) / den


def linear_utility_shift(game, s, u_current, proj_dist, move):
    """Utility of ``s`` after one agent moves between projected nodes.

    Only valid for linear utilities, where a move changes exactly two terms.

    Parameters
    ----------
    u_current : float
        Utility at ``proj_dist``.
    proj_dist : Distribution or sequence of int
        Counts over ``game.view(s)`` nodes (sink last) at which
        ``u_current`` holds.
    move : (int, int)
        Projected node indices ``(a, a2)``: one agent leaves ``a`` for ``a2``.
    """
    if game.utility.kind != "linear":
        raise TypeError("linear_utility_shift needs a linear utility")
    counts = proj_dist.counts if isinstance(proj_dist, Distribution) \
        else proj_dist
    a, a2 = move
    if counts[a] < 1:
        raise ValueError(f"cannot move an agent out of empty node {a}")
    if a == a2:
        return u_current
    view = game.view(s)
    util = game.utility
    out = u_current
    if a != view.sink:
        act = view.kept[a]
        out += util.term(s, act, counts[a] - 1) - util.term(s, act, counts[a])
    if a2 != view.sink:
        act = view.kept[a2]
        out += (util.term(s, act, counts[a2] + 1)
                - util.term(s, act, counts[a2]))
    return out


def _projected_lists(game, view, sigma, prune=True):
    """Per-agent ``[(node, prob), ...]`` on the projected graph of ``view``."""
    out = []
    for aset, probs in zip(game.action_sets, sigma):
        acc = {}
        for a, p in zip(aset, probs):
            node = view.index[a]
            acc[node] = acc.get(node, 0.0) + float(p)
        out.append([(nd, p) for nd, p in sorted(acc.items())
                    if not prune or p != 0.0])
    return out


def expected_payoff(game, i, s, sigma, method="projected"):
    """Expected payoff to agent ``i`` for playing ``s`` against ``sigma``.

    ``sigma[i]`` is ignored. No normalization check is made, so raw
    perturbations of a profile are evaluated as the multilinear form.

    Parameters
    ----------
    method : {'projected', 'distribution'}
        ``projected`` sums over pure profiles of the projected graph.
        ``distribution`` convolves agents one at a time into a table of
        projected count vectors, which stays polynomial in the number of
        agents for bounded in-degree.
    """
    view = game.view(s)
    sink = view.sink
    lists = _projected_lists(game, view, sigma)
    del lists[i]
    own = view.index[s]
    util = game.utility
    if method == "projected":
        total = 0.0
        for combo in itertools.product(*lists):
            counts = [0] * view.num_nodes
            counts[own] += 1
            p = 1.0
            for nd, pr in combo:
                counts[nd] += 1
                p *= pr
            total += util.value(s, tuple(counts[:sink])) * p
        return total
    if method == "distribution":
        start = [0] * view.num_nodes
        start[own] = 1
        table = {tuple(start): 1.0}
        for lst in lists:
            nxt = {}
            for key, p in table.items():
                for nd, pr in lst:
                    k2 = list(key)
                    k2[nd] += 1
                    k2 = tuple(k2)
                    nxt[k2] = nxt.get(k2, 0.0) + p * pr
            table = nxt
        return sum(util.value(s, key[:sink]) * p for key, p in table.items())
    raise ValueError(f"unknown method {method!r}")


def expected_payoffs(game, sigma, method="projected"):
    """Stacked expected payoffs, one per strategy coordinate (length m)."""
    return np.array([expected_payoff(game, i, a, sigma, method)
                     for i, a in game.order])


class _Counters:
    __slots__ = ("utility", "prob", "swap")

    def __init__(self):
        self.utility = self.prob = self.swap = 0


def _column_groups(game, view, agent):
    """Columns of ``agent`` to compute explicitly for a row with ``view``.

    Returns ``[(column position, node), ...]``: every action in the
    neighborhood, plus the first action outside it as the representative
    of the shared group.
    """
    cols, rep = [], False
    for pos, a in enumerate(game.action_sets[agent]):
        node = view.index[a]
        if node != view.sink:
            cols.append((pos, node))
        elif not rep:
            cols.append((pos, node))
            rep = True
    return cols


def _row_naive(game, i, si, sigma, cnt, cap):
    n, m = game.num_agents, game.num_strats
    row = np.zeros(m)
    evals = np.zeros(m, dtype=np.int64)
    util = game.utility
    nbrs = game.neighbors[si]
    for i2 in range(n):
        if i2 == i:
            continue
        others = [j for j in range(n) if j not in (i, i2)]
        size = math.prod(len(game.action_sets[j]) for j in others)
        if size > cap:
            raise EnumerationCapError(
                f"{size} profiles exceed the naive cap of {cap}; "
                "use the projected or partitioned method")
        choices = [list(zip(game.action_sets[j], sigma[j])) for j in others]
        start = game.agent_starts[i2]
        cols = game.action_sets[i2]
        acc = np.zeros(len(cols))
        for combo in itertools.product(*choices):
            counts = [0] * game.num_actions
            counts[si] += 1
            p = 1.0
            for a, pr in combo:
                counts[a] += 1
                p *= pr
            cnt.prob += 1
            for c, a2 in enumerate(cols):
                counts[a2] += 1
                acc[c] += util.value(si, tuple(counts[a] for a in nbrs)) * p
                counts[a2] -= 1
        cnt.utility += size * len(cols)
        row[start:start + len(cols)] = acc
        evals[start:start + len(cols)] = size
    return row, evals


def _row_projected(game, i, si, sigma, lists, cnt, cap):
    n, m = game.num_agents, game.num_strats
    row = np.zeros(m)
    evals = np.zeros(m, dtype=np.int64)
    view = game.view(si)
    sink = view.sink
    util = game.utility
    own = view.index[si]
    for i2 in range(n):
        if i2 == i:
            continue
        sub = [lists[j] for j in range(n) if j not in (i, i2)]
        size = math.prod(len(lst) for lst in sub)
        if size > cap:
            raise EnumerationCapError(
                f"{size} projected profiles exceed the cap of {cap}")
        cols = _column_groups(game, view, i2)
        acc = [0.0] * len(cols)
        for combo in itertools.product(*sub):
            counts = [0] * view.num_nodes
            counts[own] += 1
            p = 1.0
            for nd, pr in combo:
                counts[nd] += 1
                p *= pr
            cnt.prob += 1
            for c, (_, nd2) in enumerate(cols):
                counts[nd2] += 1
                acc[c] += util.value(si, tuple(counts[:sink])) * p
                counts[nd2] -= 1
        cnt.utility += size * len(cols)
        start = game.agent_starts[i2]
        for (pos, _), val in zip(cols, acc):
            row[start + pos] = val
            evals[start + pos] = size
    return row, evals


def _distribution_probs(sub, num_nodes, cnt):
    """Probability of each count vector induced by independent agents.

    Profiles are visited in odometer order. When two consecutive profiles
    differ by two agents exchanging nodes the probability is updated by the
    swap ratio; otherwise it is recomputed as a product.
    """
    probs = {}
    if not sub:
        probs[(0,) * num_nodes] = 1.0
        return probs
    L = len(sub)
    lookup = [dict(lst) for lst in sub]
    idx = [0] * L
    nodes = [lst[0][0] for lst in sub]
    p = math.prod(lst[0][1] for lst in sub)
    cnt.prob += 1
    while True:
        counts = [0] * num_nodes
        for nd in nodes:
            counts[nd] += 1
        key = tuple(counts)
        probs[key] = probs.get(key, 0.0) + p
        pos = L - 1
        while pos >= 0 and idx[pos] == len(sub[pos]) - 1:
            idx[pos] = 0
            pos -= 1
        if pos < 0:
            break
        idx[pos] += 1
        new = nodes[:pos] + [sub[q][idx[q]][0] for q in range(pos, L)]
        diff = [q for q in range(pos, L) if new[q] != nodes[q]]
        if (len(diff) == 2 and new[diff[0]] == nodes[diff[1]]
                and new[diff[1]] == nodes[diff[0]]):
            j, k = diff
            p = swap_probability(p, lookup[j], lookup[k], nodes[j], nodes[k])
            cnt.swap += 1
        else:
            p = math.prod(lookup[q][nd] for q, nd in enumerate(new))
            cnt.prob += 1
        nodes = new
    return probs


def _row_partitioned(game, i, si, sigma, lists, cnt, cap):
    n, m = game.num_agents, game.num_strats
    row = np.zeros(m)
    evals = np.zeros(m, dtype=np.int64)
    view = game.view(si)
    sink = view.sink
    util = game.utility
    own = view.index[si]
    for i2 in range(n):
        if i2 == i:
            continue
        sub = [lists[j] for j in range(n) if j not in (i, i2)]
        size = math.prod(len(lst) for lst in sub)
        if size > cap:
            raise EnumerationCapError(
                f"{size} projected profiles exceed the cap of {cap}")
        dist = _distribution_probs(sub, view.num_nodes, cnt)
        cols = _column_groups(game, view, i2)
        start = game.agent_starts[i2]
        for pos, nd2 in cols:
            total = 0.0
            for key, p in dist.items():
                counts = list(key)
                counts[own] += 1
                counts[nd2] += 1
                total += util.value(si, tuple(counts[:sink])) * p
            row[start + pos] = total
            evals[start + pos] = len(dist)
        cnt.utility += len(dist) * len(cols)
    return row, evals


def share_entries(jac, game):
    """Copy each shared group's representative into the whole group.

    For row ``(i, s_i)`` and agent ``i'``, every column action outside the
    neighborhood of ``s_i`` takes the value of the first such column.
    """
    mat = jac.matrix.copy()
    for r, (i, si) in enumerate(game.order):
        view = game.view(si)
        for i2, aset in enumerate(game.action_sets):
            if i2 == i:
                continue
            start = game.agent_starts[i2]
            outside = [start + pos for pos, a in enumerate(aset)
                       if view.index[a] == view.sink]
            if len(outside) > 1:
                mat[r, outside[1:]] = mat[r, outside[0]]
    return PayoffJacobian(mat, jac.order, jac.method, jac.utility_evals,
                          jac.prob_evals, jac.swap_updates, jac.entry_evals)


def independent_entries(game):
    """Number of Jacobian entries left to compute once groups are shared."""
    total = 0
    for i, si in game.order:
        view = game.view(si)
        for i2 in range(game.num_agents):
            if i2 != i:
                total += len(_column_groups(game, view, i2))
    return total


def jacobian(game, sigma, method="partitioned", cap=NAIVE_CAP, threads=1):
    """Payoff Jacobian with the selected method.

    Parameters
    ----------
    sigma : sequence of array_like
        Mixed profile, one vector per agent aligned with its action set.
    method : {'naive', 'projected', 'partitioned'}
    cap : int
        Largest number of profiles enumerated for a single block before
        :class:`EnumerationCapError` is raised.
    threads : int
        Row blocks are spread over this many worker threads.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    sigma = [np.asarray(p, dtype=float) for p in sigma]
    m = game.num_strats
    mat = np.zeros((m, m))
    entry_evals = np.zeros((m, m), dtype=np.int64)

    def do_row(r):
        i, si = game.order[r]
        cnt = _Counters()
        if method == "naive":
            row, ev = _row_naive(game, i, si, sigma, cnt, cap)
        else:
            lists = _projected_lists(game, game.view(si), sigma)
            fn = _row_projected if method == "projected" else _row_partitioned
            row, ev = fn(game, i, si, sigma, lists, cnt, cap)
        return r, row, ev, cnt

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(do_row, range(m)))
    else:
        results = [do_row(r) for r in range(m)]
    total = _Counters()
    for r, row, ev, cnt in results:
        mat[r] = row
        entry_evals[r] = ev
        total.utility += cnt.utility
        total.prob += cnt.prob
        total.swap += cnt.swap
    jac = PayoffJacobian(mat, game.order, method, total.utility, total.prob,
                         total.swap, entry_evals)
    if method != "naive":
        jac = share_entries(jac, game)
    return jac


def jacobian_naive(game, sigma, cap=NAIVE_CAP, threads=1):
    return jacobian(game, sigma, "naive", cap, threads)


def jacobian_projected(game, sigma, cap=NAIVE_CAP, threads=1):
    return jacobian(game, sigma, "projected", cap, threads)


def jacobian_partitioned(game, sigma, cap=NAIVE_CAP, threads=1):
    return jacobian(game, sigma, "partitioned", cap, threads)
