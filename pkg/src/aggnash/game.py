"""Action-graph game data model.

An action-graph game is described by a number of agents, a list of distinct
actions, the subset of actions open to each agent, and for every action ``s``
the ordered list ``neighbors[s]`` of actions whose head counts can influence
the payoff of an agent playing ``s``. Utilities are a function of the action
taken and the counts at its neighbors only, so a table keyed by neighbor
counts (or a sum of per-neighbor terms) is a complete description.

Actions are referred to by integer index everywhere in memory. Mixed
strategies are lists with one probability array per agent, aligned with that
agent's entry in ``action_sets``.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np


class UtilityLookupError(LookupError):
    """Raised when a utility is requested for an unsupported count vector."""

    def __init__(self, action, counts):
        self.action = action
        self.counts = tuple(counts)
        super().__init__(
            f"no utility for action {action} at neighbor counts {self.counts}")


class InvalidProfileError(ValueError):
    """A pure or mixed profile does not fit the game's action sets."""


class TableUtility:
    """Utility given by explicit tables.

    Parameters
    ----------
    tables : sequence of mappings
        ``tables[s]`` maps a tuple of counts, aligned with ``neighbors[s]``,
        to the payoff of playing ``s``.
    """

    kind = "table"

    def __init__(self, tables: Sequence[Mapping[tuple, float]]):
        self.tables = tuple(
            {tuple(int(c) for c in k): float(v) for k, v in t.items()}
            for t in tables)

    def value(self, s, counts):
        try:
            return self.tables[s][counts]
        except KeyError:
            raise UtilityLookupError(s, counts) from None

    def bounds(self, s):
        vals = self.tables[s].values()
        if not vals:
            return 0.0, 0.0
        return min(vals), max(vals)


class LinearUtility:
    """Utility that is a sum of per-neighbor count effects.

    ``u(s, D) = sum over a in neighbors[s] of f[s][a][D(a)]``.

    Parameters
    ----------
    terms : sequence of mappings
        ``terms[s]`` maps a neighbor action index ``a`` to an array ``f`` of
        length ``num_agents + 1``. Neighbors without an entry contribute zero.
    """

    kind = "linear"

    def __init__(self, terms: Sequence[Mapping[int, Sequence[float]]]):
        self.terms = tuple(
            {int(a): np.asarray(f, dtype=float) for a, f in t.items()}
            for t in terms)
        self._aligned = None

    def bind(self, neighbors):
        """Align the per-neighbor arrays with the neighbor lists."""
        self._aligned = tuple(
            tuple(None if a not in t else t[a].tolist() for a in nbrs)
            for t, nbrs in zip(self.terms, neighbors))
        return self

    def value(self, s, counts):
        total = 0.0
        try:
            for f, c in zip(self._aligned[s], counts):
                if f is not None:
                    total += f[c]
        except IndexError:
            raise UtilityLookupError(s, counts) from None
        return total

    def term(self, s, a, count):
        """Single term ``f[s][a][count]``, zero when ``a`` has no term."""
        f = self.terms[s].get(a)
        return 0.0 if f is None else float(f[count])

    def bounds(self, s):
        lo = hi = 0.0
        for f in self.terms[s].values():
            if len(f):
                lo += f.min()
                hi += f.max()
        return float(lo), float(hi)


@dataclass(frozen=True)
class Distribution:
    """Counts of agents per node of a carrier graph.

    The carrier is either the full action graph (one entry per action) or a
    projected graph, in which case the last entry is the sink node that
    collects every non-neighbor.
    """

    counts: tuple

    def __post_init__(self):
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be non-negative")

    @property
    def total(self):
        return sum(self.counts)

    def __len__(self):
        return len(self.counts)

    def __getitem__(self, idx):
        return self.counts[idx]


@dataclass(frozen=True)
class ProjectedView:
    """The action graph as seen from one anchor action.

    Only the anchor's neighbors are kept; every other action collapses into a
    single sink node, stored last.
    """

    anchor: int
    kept: tuple
    num_actions: int
    index: tuple = field(repr=False)

    @classmethod
    def build(cls, anchor, kept, num_actions):
        kept = tuple(kept)
        sink = len(kept)
        index = [sink] * num_actions
        for pos, a in enumerate(kept):
            index[a] = pos
        return cls(anchor, kept, num_actions, tuple(index))

    @property
    def sink(self):
        return len(self.kept)

    @property
    def num_nodes(self):
        return len(self.kept) + 1

    def node_of(self, action):
        """Projected node index of a full-graph action."""
        return self.index[action]


class ActionGraphGame:
    """An action-graph game.

    Construction does no checking beyond type coercion; call
    :func:`validate_game` to get a list of structural problems.

    Parameters
    ----------
    num_agents : int
    actions : sequence of str
        Distinct action names. Position defines the action index.
    action_sets : sequence of sequences of int
        The actions available to each agent, in the agent's own order.
    neighbors : sequence of sequences of int
        ``neighbors[s]`` lists the actions whose counts affect ``s``.
    utility : TableUtility or LinearUtility
    """

    def __init__(self, num_agents, actions, action_sets, neighbors, utility):
        self.num_agents = int(num_agents)
        self.actions = tuple(str(a) for a in actions)
        self.action_sets = tuple(tuple(int(a) for a in aset)
                                 for aset in action_sets)
        self.neighbors = tuple(tuple(int(a) for a in nbrs)
                               for nbrs in neighbors)
        if isinstance(utility, LinearUtility):
            utility.bind(self.neighbors)
        self.utility = utility

        self.num_actions = len(self.actions)
        sizes = [len(aset) for aset in self.action_sets]
        self.num_strats = int(sum(sizes))
        self.agent_starts = tuple(int(x) for x in np.cumsum([0] + sizes[:-1]))
        # flat coordinate -> (agent, action index)
        self.order = tuple((i, a) for i, aset in enumerate(self.action_sets)
                           for a in aset)
        self.__dict__["_views"] = {}
        self.__dict__["_sealed"] = True

    def __setattr__(self, name, value):
        if self.__dict__.get("_sealed"):
            raise AttributeError(f"ActionGraphGame is immutable ({name})")
        super().__setattr__(name, value)

    def __repr__(self):
        return (f"ActionGraphGame(num_agents={self.num_agents}, "
                f"num_actions={self.num_actions}, "
                f"max_in_degree={self.max_in_degree}, "
                f"utility={self.utility.kind!r})")

    @functools.cached_property
    def max_in_degree(self):
        return max((len(n) for n in self.neighbors), default=0)

    @functools.cached_property
    def is_symmetric(self):
        """True when every agent has the same ordered action set."""
        return len(set(self.action_sets)) <= 1

    def view(self, s) -> ProjectedView:
        """Projected graph of action ``s`` (cached per game)."""
        v = self._views.get(s)
        if v is None:
            v = ProjectedView.build(s, self.neighbors[s], self.num_actions)
            self._views[s] = v
        return v

    def utility_of(self, s, neighbor_counts):
        """Utility of action ``s`` given counts aligned with neighbors[s]."""
        return self.utility.value(s, tuple(neighbor_counts))

    def utility_full(self, s, full_counts):
        """Utility of action ``s`` given counts over the full graph."""
        return self.utility.value(
            s, tuple(int(full_counts[a]) for a in self.neighbors[s]))

    def utility_bounds(self):
        """Lower and upper bound over every utility value of the game."""
        lo, hi = np.inf, -np.inf
        for s in range(self.num_actions):
            a, b = self.utility.bounds(s)
            lo, hi = min(lo, a), max(hi, b)
        if not np.isfinite(lo):
            return 0.0, 0.0
        return float(lo), float(hi)

    # profile helpers

    def flatten(self, profile):
        """Concatenate per-agent vectors into one vector of length m."""
        return np.concatenate([np.asarray(p, dtype=float) for p in profile])

    def unflatten(self, vec):
        vec = np.asarray(vec, dtype=float)
        return [vec[st:st + len(aset)] for st, aset
                in zip(self.agent_starts, self.action_sets)]

    def uniform_profile(self):
        return [np.full(len(aset), 1.0 / len(aset))
                for aset in self.action_sets]

    def pure_profile(self, choices):
        """Mixed profile placing all mass on one action per agent."""
        prof = []
        for aset, a in zip(self.action_sets, choices):
            vec = np.zeros(len(aset))
            vec[aset.index(a)] = 1.0
            prof.append(vec)
        return prof

    def random_profile(self, rng):
        return [rng.dirichlet(np.ones(len(aset))) for aset in self.action_sets]


def check_profile(game, profile, tol=1e-12):
    """Coerce and validate a mixed profile, returning a list of arrays.

    Raises
    ------
    InvalidProfileError
        Wrong number of agents, wrong vector length, negative entries, or a
        vector that does not sum to one within ``tol``.
    """
    if len(profile) != game.num_agents:
        raise InvalidProfileError(
            f"expected {game.num_agents} strategies, got {len(profile)}")
    out = []
    for i, (vec, aset) in enumerate(zip(profile, game.action_sets)):
        vec = np.asarray(vec, dtype=float)
        if vec.shape != (len(aset),):
            raise InvalidProfileError(
                f"agent {i}: expected {len(aset)} probabilities, "
                f"got shape {vec.shape}")
        if np.any(vec < 0) or abs(vec.sum() - 1.0) > tol:
            raise InvalidProfileError(
                f"agent {i}: not a probability vector: {vec}")
        out.append(vec)
    return out


@dataclass
class Violation:
    kind: str
    message: str
    action: int | None = None
    counts: tuple | None = None


@dataclass
class ValidationReport:
    violations: list

    @property
    def ok(self):
        return not self.violations

    def to_dict(self):
        if self.ok:
            return {"status": "ok"}
        return {"status": "invalid",
                "violations": [
                    {k: v for k, v in vars(viol).items() if v is not None}
                    for viol in self.violations]}


def reachable_counts(game, s):
    """All neighbor-count vectors of ``s`` that some pure profile realizes.

    Only profiles in which at least one agent plays ``s`` are considered.
    Vectors are aligned with ``neighbors[s]``.
    """
    view = game.view(s)
    sink = view.sink
    choices = [frozenset(view.node_of(a) for a in aset)
               for aset in game.action_sets]
    reachable = set()
    # agents with the same action set yield the same configurations
    done = set()
    for i, aset in enumerate(game.action_sets):
        if s not in aset or aset in done:
            continue
        done.add(aset)
        start = [0] * view.num_nodes
        start[view.node_of(s)] += 1
        states = {tuple(start)}
        for j, opts in enumerate(choices):
            if j == i:
                continue
            nxt = set()
            for st in states:
                for node in opts:
                    lst = list(st)
                    lst[node] += 1
                    nxt.add(tuple(lst))
            states = nxt
        reachable.update(st[:sink] for st in states)
    return reachable


def validate_game(game, check_utilities=True):
    """Check the structural constraints of an action-graph game.

    Returns
    -------
    ValidationReport
        ``report.ok`` is True for a well-formed game; otherwise
        ``report.violations`` names each problem.
    """
    viol = []
    nact = game.num_actions
    if game.num_agents < 1:
        viol.append(Violation("agents", "num_agents must be positive"))
    if len(set(game.actions)) != nact:
        viol.append(Violation("actions", "action identifiers must be unique"))
    if len(game.action_sets) != game.num_agents:
        viol.append(Violation(
            "action_sets",
            f"{len(game.action_sets)} action sets for {game.num_agents} agents"))
    if len(game.neighbors) != nact:
        viol.append(Violation(
            "neighbors", f"{len(game.neighbors)} neighbor lists for "
            f"{nact} actions"))
    for i, aset in enumerate(game.action_sets):
        if not aset:
            viol.append(Violation("action_sets", f"agent {i} has no actions"))
        for a in aset:
            if not 0 <= a < nact:
                viol.append(Violation(
                    "index", f"agent {i} action index {a} out of range", a))
        if len(set(aset)) != len(aset):
            viol.append(Violation(
                "action_sets", f"agent {i} lists an action twice"))
    for s, nbrs in enumerate(game.neighbors):
        for a in nbrs:
            if not 0 <= a < nact:
                viol.append(Violation(
                    "index", f"neighbor index {a} of action {s} out of range",
                    s))
        if len(set(nbrs)) != len(nbrs):
            viol.append(Violation(
                "neighbors", f"action {s} lists a neighbor twice", s))
    used = {a for aset in game.action_sets for a in aset}
    for s in range(nact):
        if s not in used:
            viol.append(Violation(
                "unreachable", f"action {s} is in no agent's action set", s))
    if viol or not check_utilities:
        return ValidationReport(viol)

    util = game.utility
    for s in range(nact):
        if util.kind == "linear":
            extra = set(util.terms[s]) - set(game.neighbors[s])
            for a in sorted(extra):
                viol.append(Violation(
                    "utility", f"linear term of action {s} references "
                    f"non-neighbor {a}", s))
            for a, f in util.terms[s].items():
                if len(f) < game.num_agents + 1:
                    viol.append(Violation(
                        "utility", f"linear term f[{s}][{a}] has {len(f)} "
                        f"entries, need {game.num_agents + 1}", s))
            continue
        for counts in sorted(reachable_counts(game, s)):
            if counts not in util.tables[s]:
                viol.append(Violation(
                    "missing_utility",
                    f"no utility for action {s} at counts {counts}",
                    s, counts))
    return ValidationReport(viol)


def distribution_of(game, pure_profile):
    """Count how many agents chose each action.

    Parameters
    ----------
    pure_profile : sequence of int
        Action index chosen by each agent.
    """
    if len(pure_profile) != game.num_agents:
        raise InvalidProfileError(
            f"expected {game.num_agents} choices, got {len(pure_profile)}")
    counts = [0] * game.num_actions
    for i, a in enumerate(pure_profile):
        if a not in game.action_sets[i]:
            raise InvalidProfileError(
                f"agent {i} cannot play action {a}")
        counts[a] += 1
    return Distribution(counts)


def project_distribution(view, dist):
    """Collapse a full-graph distribution onto ``view``'s projected graph."""
    counts = list(dist.counts)
    if len(counts) != view.num_actions:
        raise ValueError("distribution is not carried by the full graph")
    out = [0] * view.num_nodes
    for a, c in enumerate(counts):
        out[view.node_of(a)] += c
    return Distribution(out)


def project_mixed_strategy(view, actions, probs):
    """Projected mixed strategy of one agent.

    Parameters
    ----------
    actions : sequence of int
        The agent's action set.
    probs : array_like
        Probabilities aligned with ``actions``.

    Returns
    -------
    ndarray of length ``view.num_nodes``; the last entry is the sink.
    """
    out = np.zeros(view.num_nodes)
    for a, p in zip(actions, probs):
        out[view.node_of(a)] += p
    return out


def utility_eval(game, s, proj_dist, adjust=()):
    """Payoff of action ``s`` at a projected distribution.

    Parameters
    ----------
    proj_dist : Distribution
        Carried by ``game.view(s)``.
    adjust : sequence of int, optional
        Full-graph actions whose players are added before evaluation, e.g.
        the two pinned agents of a Jacobian entry.
    """
    view = game.view(s)
    counts = list(proj_dist.counts)
    if len(counts) != view.num_nodes:
        raise ValueError("distribution is not carried by the view of s")
    for a in adjust:
        counts[view.node_of(a)] += 1
    return game.utility.value(s, tuple(counts[:view.sink]))
