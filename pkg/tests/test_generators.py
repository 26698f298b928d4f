import itertools

import numpy as np
import pytest

from aggnash import (coordination_2x2, encode_graphical_game,
                     encode_normal_form, expected_payoffs, generate_ice_cream,
                     matching_pennies, random_game, rock_paper_scissors,
                     shared_coordination, validate_game)
from aggnash.oracle import expand_normal_form


def _in_degrees(g):
    return [len(n) for n in g.neighbors]


def _cluster_edges(g, i, j):
    """True if some node of agent i's cluster is a neighbor of agent j's."""
    return any(a in g.neighbors[b]
               for a in g.action_sets[i] for b in g.action_sets[j])


def test_normal_form_3x3x3_structure():
    rng = np.random.default_rng(0)
    g = encode_normal_form([rng.normal(size=(3, 3, 3)) for _ in range(3)])
    assert g.num_actions == 9
    assert _in_degrees(g) == [6] * 9
    for i in range(3):
        for a in g.action_sets[i]:
            assert not set(g.neighbors[a]) & set(g.action_sets[i])
    assert validate_game(g).ok


def test_normal_form_round_trip():
    rng = np.random.default_rng(2)
    tensors = [rng.normal(size=(2, 3, 2)) for _ in range(3)]
    back = expand_normal_form(encode_normal_form(tensors))
    for t, b in zip(tensors, back):
        np.testing.assert_array_equal(t, b)


def test_pennies_expected_payoffs_match_bimatrix():
    A = np.array([[1.0, -1.0], [-1.0, 1.0]])
    g = encode_normal_form([A, -A])
    assert _in_degrees(g) == [2] * 4
    rng = np.random.default_rng(4)
    for _ in range(20):
        p, q = rng.dirichlet([1, 1]), rng.dirichlet([1, 1])
        V = expected_payoffs(g, [p, q])
        np.testing.assert_allclose(V[:2], A @ q, atol=1e-12)
        np.testing.assert_allclose(V[2:], -A.T @ p, atol=1e-12)


def test_one_player_normal_form():
    g = encode_normal_form([np.array([1.0, 2.0, 3.0])])
    assert _in_degrees(g) == [0, 0, 0]
    assert validate_game(g).ok


def test_ragged_tensors_rejected():
    with pytest.raises(ValueError):
        encode_normal_form([np.zeros((2, 2)), np.zeros((2, 3))])


def test_graphical_chain():
    rng = np.random.default_rng(5)
    parents = [[1], [0, 2], [1]]
    payoffs = [rng.normal(size=(2, 2)), rng.normal(size=(2, 2, 2)),
               rng.normal(size=(2, 2))]
    g = encode_graphical_game(parents, payoffs)
    assert validate_game(g).ok
    assert not _cluster_edges(g, 0, 2) and not _cluster_edges(g, 2, 0)
    assert _cluster_edges(g, 1, 0) and _cluster_edges(g, 0, 1)
    T = expand_normal_form(g)
    for a, b, c in itertools.product(range(2), repeat=3):
        assert T[0][a, b, c] == payoffs[0][a, b]
        assert T[1][a, b, c] == payoffs[1][b, a, c]
        assert T[2][a, b, c] == payoffs[2][c, b]


def test_graphical_edgeless():
    g = encode_graphical_game([[], []], [np.array([1.0, 2.0]),
                                         np.array([0.0, 5.0])])
    assert _in_degrees(g) == [0] * 4
    T = expand_normal_form(g)
    np.testing.assert_array_equal(T[0], [[1, 1], [2, 2]])


def test_graphical_clique_matches_normal_form():
    rng = np.random.default_rng(6)
    t = [rng.normal(size=(2, 2)) for _ in range(2)]
    a = encode_graphical_game([[1], [0]], [t[0], t[1].T])
    b = encode_normal_form(t)
    assert a.neighbors == b.neighbors


def test_graphical_arity_mismatch():
    with pytest.raises(ValueError):
        encode_graphical_game([[1], []], [np.zeros(2), np.zeros(2)])


def test_ice_cream_figure_structure():
    g = generate_ice_cream(3, 4, 2)
    assert g.num_actions == 8
    assert g.actions == ("C0", "C1", "C2", "C3", "V0", "V1", "V2", "V3")
    deg = _in_degrees(g)
    # end locations see two locations, interior ones three
    assert deg == [4, 6, 6, 4, 4, 6, 6, 4]
    assert g.action_sets == ((0, 1, 2, 3),) * 2 + ((4, 5, 6, 7),)


def test_ice_cream_graph_independent_of_n():
    a, b = generate_ice_cream(3, 4), generate_ice_cream(30, 4)
    assert a.neighbors == b.neighbors and a.actions == b.actions


def test_lone_vendor_earns_nothing():
    g = generate_ice_cream(1, 3, 1)
    for a in range(g.num_actions):
        counts = [0] * g.num_actions
        counts[a] = 1
        assert g.utility_full(a, counts) == 0.0


def test_ice_cream_hand_values():
    g = generate_ice_cream(3, 3, shared=True, w_c=2.0, w_v=0.5)
    # C0 with another chocolate at C1 and a vanilla at V0
    counts = [1, 1, 0, 1, 0, 0]
    assert g.utility_full(0, counts) == 0.5 * 1 - 2.0 * 1
    # V2 only sees locations 1 and 2: the C0 vendor is invisible
    counts = [1, 0, 0, 0, 0, 1]
    assert g.utility_full(5, counts) == 0.0


def test_shared_ice_cream_symmetric():
    g = generate_ice_cream(4, 2, shared=True)
    assert g.is_symmetric and validate_game(g).ok


def test_rps_table():
    g = rock_paper_scissors(3)
    assert validate_game(g).ok
    assert g.utility_full(0, [1, 0, 2]) == 2.0
    assert g.utility_full(0, [1, 1, 1]) == 0.0


@pytest.mark.parametrize("make", [matching_pennies, coordination_2x2,
                                  lambda: shared_coordination(4)])
def test_small_fixtures_validate(make):
    assert validate_game(make()).ok


def test_random_game_deterministic():
    a = random_game(3, 5, 2, seed=7)
    b = random_game(3, 5, 2, seed=7)
    assert a.neighbors == b.neighbors
    assert a.utility.tables == b.utility.tables
    assert validate_game(a).ok
    assert max(_in_degrees(a)) <= 2


def test_random_linear_game_validates():
    g = random_game(4, 6, 3, seed=1, kind="linear", exact_degree=True)
    assert validate_game(g).ok
    assert _in_degrees(g) == [3] * 6
