import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from aggnash import (ActionGraphGame, Distribution, ProjectedView,
                     TableUtility, UtilityLookupError, distribution_of,
                     encode_normal_form, generate_ice_cream,
                     project_distribution, project_mixed_strategy,
                     random_game, rock_paper_scissors, utility_eval,
                     validate_game)
from aggnash.game import InvalidProfileError, check_profile

from conftest import table_game, two_node_linear_game


# validation

def test_ice_cream_validates():
    assert validate_game(generate_ice_cream(3, 4, 2)).ok


def test_missing_table_entry_is_named():
    # two agents, one action whose only neighbor is itself
    g = table_game(2, [[0], [0]], [[0]], [{}])
    rep = validate_game(g)
    assert not rep.ok
    v = rep.violations[0]
    assert v.kind == "missing_utility"
    assert v.action == 0 and v.counts == (2,)


def test_missing_entry_two_counts():
    g = table_game(2, [[0, 1]] * 2, [[0, 1], [0, 1]],
                   [{(1, 1): 0.0, (0, 2): 1.0},
                    {(2, 0): 0.0, (1, 1): 0.0, (0, 2): 0.0}])
    rep = validate_game(g)
    assert [(v.action, v.counts) for v in rep.violations] == [(0, (2, 0))]
    assert rep.to_dict()["violations"][0]["counts"] == (2, 0)


def test_action_set_out_of_range():
    g = table_game(1, [[0, 1]], [[]], [{(): 0.0}])
    rep = validate_game(g)
    assert any(v.kind == "index" for v in rep.violations)


def test_unreachable_action_reported():
    g = table_game(1, [[0]], [[], []], [{(): 0.0}, {(): 0.0}])
    kinds = {v.kind for v in validate_game(g).violations}
    assert kinds == {"unreachable"}


def test_linear_term_on_non_neighbor():
    g = two_node_linear_game()
    g.utility.terms[1][0] = np.zeros(4)
    assert not validate_game(g).ok


def test_validation_only_checks_reachable_counts():
    # agent 1 can never reach node 0, so counts (2,) are not required
    g = table_game(2, [[0], [1]], [[0], []], [{(1,): 3.0}, {(): 0.0}])
    assert validate_game(g).ok


# distributions and projection

def test_distribution_counts():
    g = table_game(3, [[0, 1, 2]] * 3, [[], [], []], [{(): 0.0}] * 3)
    assert distribution_of(g, [0, 0, 1]).counts == (2, 1, 0)
    assert distribution_of(g, [2, 2, 2]).counts == (0, 0, 3)


def test_distribution_rejects_foreign_action():
    g = table_game(2, [[0], [1]], [[], []], [{(): 0.0}] * 2)
    with pytest.raises(InvalidProfileError):
        distribution_of(g, [1, 1])


def test_normal_form_encoding_counts_are_binary():
    rng = np.random.default_rng(1)
    g = encode_normal_form([rng.normal(size=(2, 3, 2)) for _ in range(3)])
    for prof in [(0, 2, 5), (1, 4, 6), (0, 3, 6)]:
        c = np.array(distribution_of(g, prof).counts)
        assert set(c) <= {0, 1}
        for aset in g.action_sets:
            assert c[list(aset)].sum() == 1


def test_projection_example():
    # S = {a, b, c, s}, nu(s) = {a, s}
    view = ProjectedView.build(3, (0, 3), 4)
    d = project_distribution(view, Distribution((1, 2, 0, 1)))
    assert d.counts == (1, 1, 2)


def test_projection_identity_and_degenerate():
    full = ProjectedView.build(0, (0, 1, 2), 3)
    assert project_distribution(full, Distribution((1, 0, 2))).counts == \
        (1, 0, 2, 0)
    empty = ProjectedView.build(0, (), 3)
    assert project_distribution(empty, Distribution((1, 0, 2))).counts == (3,)


def test_projected_mixed_strategy():
    view = ProjectedView.build(0, (0,), 4)
    q = project_mixed_strategy(view, [0, 1, 2, 3], np.full(4, 0.25))
    np.testing.assert_allclose(q, [0.25, 0.75])
    inside = ProjectedView.build(0, (0, 1), 4)
    q = project_mixed_strategy(inside, [0, 1], [0.3, 0.7])
    assert q[-1] == 0.0
    outside = ProjectedView.build(0, (0,), 4)
    np.testing.assert_allclose(
        project_mixed_strategy(outside, [2, 3], [0.5, 0.5]), [0.0, 1.0])


@given(st.integers(0, 10_000))
def test_projection_commutes_with_counting(seed):
    rng = np.random.default_rng(seed)
    g = random_game(4, 5, 3, seed=seed)
    prof = [int(rng.choice(a)) for a in g.action_sets]
    d = distribution_of(g, prof)
    assert d.total == 4
    for s in range(g.num_actions):
        view = g.view(s)
        proj = project_distribution(view, d)
        assert proj.total == d.total
        direct = [0] * view.num_nodes
        for a in prof:
            direct[view.node_of(a)] += 1
        assert proj.counts == tuple(direct)


# utility evaluation

def test_rps_utilities():
    g = rock_paper_scissors(2)
    view = g.view(0)

    def at(r, p, s):
        return utility_eval(g, 0, Distribution((r, p, s, 0)))

    assert at(1, 0, 1) == 1.0
    assert at(2, 0, 0) == 0.0
    assert at(1, 1, 0) == -1.0
    assert view.num_nodes == 4


def test_linear_utility_sum():
    g = two_node_linear_game()
    assert utility_eval(g, 0, Distribution((2, 0, 0))) == 2.0


def test_adjust_through_sink_leaves_value_unchanged():
    g = table_game(3, [[0, 1]] * 3, [[0], []],
                   [{(1,): 5.0, (2,): 7.0, (3,): 9.0}, {(): 0.0}])
    base = utility_eval(g, 0, Distribution((1, 0)), adjust=(0,))
    pinned = utility_eval(g, 0, Distribution((1, 0)), adjust=(0, 1))
    assert base == pinned == 7.0


def test_missing_entry_raises_with_counts():
    g = table_game(2, [[0], [0]], [[0]], [{(1,): 0.0}])
    with pytest.raises(UtilityLookupError) as err:
        utility_eval(g, 0, Distribution((2, 0)))
    assert "(2,)" in str(err.value)


@given(st.integers(0, 10_000))
def test_context_specific_independence(seed):
    rng = np.random.default_rng(seed)
    g = random_game(3, 5, 2, seed=seed, shared=True)
    prof = [int(rng.choice(a)) for a in g.action_sets]
    s = prof[0]
    d = distribution_of(g, prof)
    base = g.utility_full(s, d.counts)
    # move another agent between two non-neighbors of s
    outside = [a for a in range(g.num_actions) if a not in g.neighbors[s]]
    movers = [j for j in (1, 2) if prof[j] in outside]
    if len(outside) >= 2 and movers:
        j = movers[0]
        counts = list(d.counts)
        counts[prof[j]] -= 1
        counts[[a for a in outside if a != prof[j]][0]] += 1
        assert g.utility_full(s, counts) == base


# profiles and bookkeeping

def test_check_profile():
    g = generate_ice_cream(2, 2)
    check_profile(g, [[0.5, 0.5], [1.0, 0.0]])
    with pytest.raises(InvalidProfileError):
        check_profile(g, [[0.5, 0.6], [1.0, 0.0]])
    with pytest.raises(InvalidProfileError):
        check_profile(g, [[1.0], [1.0, 0.0]])


def test_flatten_roundtrip(rng):
    g = random_game(3, 5, 2, seed=3)
    prof = g.random_profile(rng)
    back = g.unflatten(g.flatten(prof))
    for a, b in zip(prof, back):
        np.testing.assert_array_equal(a, b)


def test_max_in_degree_and_symmetry():
    g = generate_ice_cream(3, 4, shared=True)
    assert g.max_in_degree == 6
    assert g.is_symmetric
    assert not generate_ice_cream(3, 4, 2).is_symmetric


def test_game_is_immutable():
    g = rock_paper_scissors()
    with pytest.raises(AttributeError):
        g.num_agents = 5


def test_table_utility_bounds():
    u = TableUtility([{(0,): -2.0, (1,): 3.0}])
    assert u.bounds(0) == (-2.0, 3.0)
    g = ActionGraphGame(1, ["x"], [[0]], [[0]], u)
    assert g.utility_bounds() == (-2.0, 3.0)
