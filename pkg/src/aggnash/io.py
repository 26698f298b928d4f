"""JSON readers and writers for games, strategies and reports.

Game file layout::

    {"version": 1, "num_agents": n, "actions": [...],
     "action_sets": [[...], ...], "neighbors": [[...], ...],
     "utility": {"kind": "table",
                 "table": {"0": [{"counts": [...], "value": x}, ...], ...}}}

A linear utility is ``{"kind": "linear", "terms": {"s": {"a": [f0..fn]}}}``.
Action indices are written as strings when used as keys.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .game import ActionGraphGame, LinearUtility, TableUtility

FORMAT_VERSION = 1


class FormatError(ValueError):
    """A file does not follow the expected JSON layout."""


def dumps(doc):
    """Canonical JSON text (stable across runs)."""
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _write(doc, path):
    Path(path).write_text(dumps(doc), encoding="utf-8")


def _read(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from None


def _version(doc, what):
    if not isinstance(doc, dict):
        raise FormatError(f"{what}: top level must be an object")
    if doc.get("version") != FORMAT_VERSION:
        raise FormatError(f"{what}: unsupported version {doc.get('version')!r}")


# games

def game_to_dict(game):
    u = game.utility
    if u.kind == "table":
        payload = {"kind": "table", "table": {
            str(s): [{"counts": list(k), "value": v}
                     for k, v in sorted(t.items())]
            for s, t in enumerate(u.tables)}}
    else:
        payload = {"kind": "linear", "terms": {
            str(s): {str(a): [float(x) for x in f]
                     for a, f in sorted(t.items())}
            for s, t in enumerate(u.terms)}}
    return {
        "version": FORMAT_VERSION,
        "num_agents": game.num_agents,
        "actions": list(game.actions),
        "action_sets": [list(a) for a in game.action_sets],
        "neighbors": [list(a) for a in game.neighbors],
        "utility": payload,
    }


def _index_keyed(mapping, m, what):
    out = [None] * m
    for key, val in mapping.items():
        try:
            s = int(key)
        except (TypeError, ValueError):
            raise FormatError(f"{what}: key {key!r} is not an index") from None
        if not 0 <= s < m:
            raise FormatError(f"{what}: index {s} out of range")
        out[s] = val
    return out


def game_from_dict(doc):
    _version(doc, "game")
    try:
        n = int(doc["num_agents"])
        actions = list(doc["actions"])
        action_sets = [[int(a) for a in aset] for aset in doc["action_sets"]]
        neighbors = [[int(a) for a in nb] for nb in doc["neighbors"]]
        util = doc["utility"]
        kind = util["kind"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"game: missing or malformed field ({exc})") from None
    m = len(actions)
    if n < 1:
        raise FormatError("game: num_agents must be positive")
    if len(action_sets) != n:
        raise FormatError(f"game: {len(action_sets)} action sets for {n} agents")
    if len(neighbors) != m:
        raise FormatError(f"game: {len(neighbors)} neighbor lists for "
                          f"{m} actions")
    try:
        if kind == "table":
            rows = _index_keyed(util["table"], m, "utility table")
            tables = [{tuple(int(c) for c in e["counts"]): float(e["value"])
                       for e in (r or [])} for r in rows]
            utility = TableUtility(tables)
        elif kind == "linear":
            rows = _index_keyed(util["terms"], m, "utility terms")
            utility = LinearUtility([{int(a): f for a, f in (r or {}).items()}
                                     for r in rows])
        else:
            raise FormatError(f"game: unknown utility kind {kind!r}")
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"game: malformed utility ({exc})") from None
    return ActionGraphGame(n, actions, action_sets, neighbors, utility)


def save_game(game, path):
    _write(game_to_dict(game), path)


def load_game(path):
    return game_from_dict(_read(path))


# strategies

def strategies_to_dict(sigma):
    return {"version": FORMAT_VERSION,
            "strategies": [[float(x) for x in p] for p in sigma]}


def strategies_from_dict(doc, game=None):
    """Parse a strategy document; check shapes against ``game`` if given."""
    _version(doc, "strategy")
    try:
        sigma = [np.asarray(p, dtype=float) for p in doc["strategies"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"strategy: malformed ({exc})") from None
    if any(p.ndim != 1 for p in sigma):
        raise FormatError("strategy: each entry must be a flat list")
    if game is not None:
        if len(sigma) != game.num_agents:
            raise FormatError(f"strategy: {len(sigma)} vectors for "
                              f"{game.num_agents} agents")
        for i, (p, aset) in enumerate(zip(sigma, game.action_sets)):
            if p.size != len(aset):
                raise FormatError(f"strategy: agent {i} has {p.size} "
                                  f"entries, expected {len(aset)}")
    return sigma


def save_strategies(sigma, path):
    _write(strategies_to_dict(sigma), path)


def load_strategies(path, game=None):
    return strategies_from_dict(_read(path), game)


# normal-form and graphical inputs

def load_normal_form(path):
    """Payoff tensors from ``{"version": 1, "payoffs": [...]}``."""
    doc = _read(path)
    _version(doc, "normal form")
    try:
        payoffs = [np.asarray(p, dtype=float) for p in doc["payoffs"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"normal form: malformed payoffs ({exc})") from None
    shapes = {p.shape for p in payoffs}
    if len(shapes) != 1 or len(next(iter(shapes))) != len(payoffs):
        raise FormatError("normal form: need one n-dimensional tensor per "
                          "agent, all of the same shape")
    return payoffs


def load_graphical(path):
    """``(parents, payoffs)`` from a graphical-game document.

    ``payoffs[i]`` has axes ``(own, *parents[i])``.
    """
    doc = _read(path)
    _version(doc, "graphical game")
    try:
        parents = [[int(j) for j in p] for p in doc["parents"]]
        payoffs = [np.asarray(p, dtype=float) for p in doc["payoffs"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"graphical game: malformed ({exc})") from None
    if len(parents) != len(payoffs):
        raise FormatError("graphical game: parents and payoffs differ in "
                          "length")
    for i, (par, t) in enumerate(zip(parents, payoffs)):
        if t.ndim != len(par) + 1:
            raise FormatError(f"graphical game: agent {i} tensor has "
                              f"{t.ndim} axes, expected {len(par) + 1}")
    return parents, payoffs
