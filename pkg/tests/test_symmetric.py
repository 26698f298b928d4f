import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from aggnash import (CompositionWalk, class_size, composition_walk_next,
                     distribution_prob_step, generate_ice_cream,
                     jacobian_naive, jacobian_symmetric, random_game,
                     rock_paper_scissors, symmetric_distribution_prob,
                     symmetric_profile_prob)
from aggnash.compositions import compositions
from aggnash.symmetric import AsymmetricGameError, symmetric_expected_payoffs
from aggnash.payoff import expected_payoffs


# composition walk

def _walk(total, parts):
    w = CompositionWalk(total, parts)
    seq = [tuple(w.current)]
    moves = []
    while (mv := composition_walk_next(w)) is not None:
        moves.append(mv)
        seq.append(tuple(w.current))
    return seq, moves


def test_walk_two_parts():
    seq, _ = _walk(2, 2)
    assert seq == [(2, 0), (1, 1), (0, 2)]


@pytest.mark.parametrize("k", range(1, 7))
def test_single_agent_walks_unit_vectors(k):
    seq, _ = _walk(1, k)
    assert sorted(seq) == sorted(tuple(np.eye(k, dtype=int)[j])
                                 for j in range(k))


def test_walk_three_three():
    seq, moves = _walk(3, 3)
    assert len(seq) == 10 == len(set(seq))
    assert set(seq) == set(compositions(3, 3))
    assert len(moves) == 9


@pytest.mark.parametrize("total,parts", [(t, k) for t in range(9)
                                         for k in range(1, 7)])
def test_walk_is_hamiltonian(total, parts):
    seq, moves = _walk(total, parts)
    assert seq[0] == (total,) + (0,) * (parts - 1)
    assert len(seq) == math.comb(total + parts - 1, parts - 1)
    assert set(seq) == set(compositions(total, parts))
    assert len(set(seq)) == len(seq)
    for a, b, (src, dst) in zip(seq, seq[1:], moves):
        d = np.subtract(b, a)
        assert d[src] == -1 and d[dst] == 1
        assert np.abs(d).sum() == 2
    assert len(CompositionWalk(total, parts)) == len(seq)


def test_walk_iterator():
    assert list(CompositionWalk(2, 3)) == [(2, 0, 0), (1, 0, 1), (1, 1, 0),
                                           (0, 2, 0), (0, 1, 1), (0, 0, 2)]


def test_walk_rejects_bad_sizes():
    with pytest.raises(ValueError):
        CompositionWalk(-1, 2)
    with pytest.raises(ValueError):
        CompositionWalk(2, 0)


# multinomial pieces

def test_class_size_examples():
    assert class_size((2, 1)) == 3
    assert class_size((0, 5, 0)) == 1
    assert sum(class_size(c) for c in compositions(4, 3)) == 81
    # exact big integers
    assert class_size((100, 100)) == math.comb(200, 100)


def test_profile_probability_examples():
    assert symmetric_profile_prob((0.5, 0.5), (1, 1)) == 0.25
    assert symmetric_profile_prob((0.0, 1.0), (3, 0)) == 0.0
    assert symmetric_profile_prob((0.2, 0.8), (2, 0)) == pytest.approx(0.04)
    assert symmetric_profile_prob((0.0, 1.0), (0, 2)) == 1.0


def test_distribution_probability_examples():
    assert symmetric_distribution_prob((0.5, 0.5), (1, 1)) == 0.5
    assert symmetric_distribution_prob((0.0, 1.0, 0.0), (0, 4, 0)) == 1.0
    assert symmetric_distribution_prob((0.0, 1.0, 0.0), (1, 3, 0)) == 0.0


@given(st.integers(0, 8), st.integers(1, 5), st.integers(0, 10_000))
def test_distribution_probabilities_normalize(nbar, k, seed):
    q = np.random.default_rng(seed).dirichlet(np.ones(k))
    total = sum(symmetric_distribution_prob(q, c)
                for c in compositions(nbar, k))
    assert abs(total - 1.0) <= 1e-12


def test_large_counts_do_not_overflow():
    q = (0.5, 0.5)
    p = symmetric_distribution_prob(q, (600, 600))
    ref = math.exp(math.lgamma(1201) - 2 * math.lgamma(601)
                   + 1200 * math.log(0.5))
    assert p == pytest.approx(ref, rel=1e-9)


def test_step_examples():
    q = (0.5, 0.5)
    assert distribution_prob_step(0.25, q, (2, 0), (0, 1)) == 0.5
    back = distribution_prob_step(0.5, q, (1, 1), (1, 0))
    assert back == 0.25
    q = (0.3, 0.7)
    p = symmetric_distribution_prob(q, (3, 1))
    there = distribution_prob_step(p, q, (3, 1), (0, 1))
    assert distribution_prob_step(there, q, (2, 2), (1, 0)) == \
        pytest.approx(p, rel=1e-15)
    with pytest.raises(ZeroDivisionError):
        distribution_prob_step(0.0, (0.0, 1.0), (1, 0), (0, 1))


@pytest.mark.parametrize("seed", range(5))
def test_stepwise_probabilities_along_walk(seed):
    q = np.random.default_rng(seed).dirichlet(np.ones(4))
    w = CompositionWalk(6, 4)
    counts = list(w.current)
    p = symmetric_distribution_prob(q, counts)
    while (mv := w.next_move()) is not None:
        p = distribution_prob_step(p, q, counts, mv)
        counts = list(w.current)
        assert abs(p - symmetric_distribution_prob(q, counts)) <= 1e-12


# symmetric Jacobian

def test_rps_two_players():
    g = rock_paper_scissors(2)
    J = jacobian_symmetric(g, np.full(3, 1 / 3))
    assert J.matrix[0, 2] == 1.0
    np.testing.assert_array_equal(J.matrix, [[0, -1, 1], [1, 0, -1],
                                             [-1, 1, 0]])


@pytest.mark.parametrize("n", [3, 4])
def test_shared_ice_cream_matches_naive_block(n):
    g = generate_ice_cream(n, 3, shared=True)
    q = np.random.default_rng(n).dirichlet(np.ones(6))
    J = jacobian_symmetric(g, q).matrix
    ref = jacobian_naive(g, [q] * n).matrix
    k = len(q)
    np.testing.assert_allclose(J, ref[0:k, k:2 * k], rtol=0, atol=1e-10)
    # every off-diagonal block agrees
    for i in range(n):
        for j in range(n):
            if i != j:
                np.testing.assert_allclose(
                    ref[i * k:(i + 1) * k, j * k:(j + 1) * k], J, atol=1e-10)


@pytest.mark.parametrize("seed", range(6))
def test_random_table_games_match_naive(seed):
    n = 2 + seed % 3
    g = random_game(n, 4, 2, seed=seed, shared=True)
    q = np.random.default_rng(seed).dirichlet(np.ones(4))
    J = jacobian_symmetric(g, q).matrix
    ref = jacobian_naive(g, [q] * n).matrix
    np.testing.assert_allclose(J, ref[:4, 4:8], rtol=0, atol=1e-10)


def test_zero_probability_nodes():
    g = random_game(4, 3, 2, seed=3, shared=True)
    q = np.array([0.0, 0.4, 0.6])
    J = jacobian_symmetric(g, q).matrix
    np.testing.assert_allclose(J, jacobian_naive(g, [q] * 4).matrix[:3, 3:6],
                               atol=1e-12)


def test_row_counter_is_composition_count():
    n = 7
    g = generate_ice_cream(n, 3, shared=True)
    J = jacobian_symmetric(g, np.full(6, 1 / 6))
    for r, s in enumerate(g.action_sets[0]):
        nu = len(g.neighbors[s])
        per_entry = math.comb(n - 2 + nu, nu)
        assert J.row_evals[r] == 6 * per_entry
    assert J.utility_evals == sum(
        6 * math.comb(n - 2 + len(g.neighbors[s]), len(g.neighbors[s]))
        for s in range(6))


def test_rejects_asymmetric_inputs():
    with pytest.raises(AsymmetricGameError):
        jacobian_symmetric(generate_ice_cream(3, 2, 2), np.full(2, 0.5))
    g = generate_ice_cream(3, 2, shared=True)
    with pytest.raises(AsymmetricGameError):
        jacobian_symmetric(g, [[1, 0, 0, 0], [0, 1, 0, 0], [0, 1, 0, 0]])


def test_symmetric_expected_payoffs():
    g = random_game(4, 3, 2, seed=5, shared=True, kind="linear")
    q = np.array([0.2, 0.5, 0.3])
    V = symmetric_expected_payoffs(g, q)
    np.testing.assert_allclose(V, expected_payoffs(g, [q] * 4)[:3],
                               atol=1e-12)


def test_export():
    doc = jacobian_symmetric(rock_paper_scissors(3),
                             np.full(3, 1 / 3)).to_dict()
    assert doc["method"] == "symmetric" and doc["m"] == 3
    assert doc["order"] == [[None, 0], [None, 1], [None, 2]]
