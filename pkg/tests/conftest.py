import numpy as np
import pytest
from hypothesis import settings

from aggnash import ActionGraphGame, LinearUtility, TableUtility, random_game

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def small_random_games(count, seed0=0, **kw):
    """Seeded random games covering n in {2,3,4} and both utility kinds."""
    games = []
    for seed in range(seed0, seed0 + count):
        r = np.random.default_rng(seed)
        n = int(r.integers(2, 5))
        S = int(r.integers(2, 7))
        d = int(r.integers(1, 4))
        opts = dict(shared=bool(r.integers(2)),
                    kind=("table", "linear")[seed % 2])
        opts.update(kw)
        games.append(random_game(n, S, d, seed=seed, **opts))
    return games


def two_node_linear_game():
    """Single agent pair with f_{s,a}(k) = k and f_{s,a'}(k) = 2k."""
    k = np.arange(4, dtype=float)
    terms = [{0: k, 1: 2 * k}, {}]
    return ActionGraphGame(3, ["a", "b"], [[0, 1]] * 3, [[0, 1], []],
                           LinearUtility(terms))


def table_game(num_agents, action_sets, neighbors, tables, names=None):
    names = names or [f"s{a}" for a in range(len(neighbors))]
    return ActionGraphGame(num_agents, names, action_sets, neighbors,
                           TableUtility(tables))


def pytest_terminal_summary(terminalreporter):
    """One pass/fail line per acceptance criterion."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_criterion_" not in nodeid:
                continue
            if getattr(rep, "when", "call") != "call" and outcome == "passed":
                continue
            name = nodeid.split("::")[-1][len("test_"):]
            lines.append((name, "PASS" if outcome == "passed" else "FAIL"))
    if not lines:
        return
    terminalreporter.section("acceptance")
    for name, verdict in sorted(set(lines),
                                key=lambda x: int(x[0].split("_")[1])):
        terminalreporter.write_line(f"{verdict}  {name}")
