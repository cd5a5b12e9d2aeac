import os

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FIXTURES
from dyncond.bnet import load_network, parse_network
from dyncond.errors import StructuralError
from dyncond.netgen import random_loopy
from dyncond.network import oracle_marginals
from dyncond.polytree import PolytreeState, polytree_belief

FORK = """
var A 2 a1 a0
var B 2 b1 b0
var C 3 c0 c1 c2
cpt A |
0.6 0.4
cpt B | A
0.7 0.3
0.1 0.9
cpt C | A
0.2 0.3 0.5
0.6 0.3 0.1
"""

COLLIDER = """
var U 2 u1 u0
var V 2 v1 v0
var X 2 x1 x0
cpt U |
0.3 0.7
cpt V |
0.8 0.2
cpt X | U V
0.9 0.1
0.5 0.5
0.4 0.6
0.2 0.8
"""


@pytest.fixture
def neta():
    return load_network(os.path.join(FIXTURES, "neta.bnet"))


def test_root_pi(neta):
    np.testing.assert_allclose(PolytreeState(neta).compute_pi(0), [0.3, 0.7])


def test_child_pi(neta):
    np.testing.assert_allclose(PolytreeState(neta).compute_pi(1), [0.41, 0.59])


def test_pi_ignores_evidence_below(neta):
    np.testing.assert_allclose(PolytreeState(neta, {1: 0}).compute_pi(0), [0.3, 0.7])


def test_lambda(neta):
    np.testing.assert_allclose(PolytreeState(neta).compute_lambda(1), [1, 1])
    np.testing.assert_allclose(PolytreeState(neta, {1: 0}).compute_lambda(0), [0.9, 0.2])
    np.testing.assert_allclose(PolytreeState(neta, {1: 0}).compute_lambda(1), [1, 0])


def test_messages(neta):
    np.testing.assert_allclose(PolytreeState(neta).pi_message(0, 1), [0.3, 0.7])
    np.testing.assert_allclose(PolytreeState(neta).lambda_message(1, 0), [1, 1])
    np.testing.assert_allclose(PolytreeState(neta, {1: 0}).lambda_message(1, 0), [0.9, 0.2])


def test_message_to_non_neighbour_rejected(neta):
    with pytest.raises(ValueError):
        PolytreeState(neta).pi_message(1, 0)


def test_beliefs(neta):
    np.testing.assert_allclose(polytree_belief(neta, 1), [0.41, 0.59])
    bel = polytree_belief(neta, 0, {1: 0})
    np.testing.assert_allclose(bel, [0.27, 0.14])
    assert bel.sum() == pytest.approx(0.41)


def test_multiply_connected_rejected():
    with pytest.raises(StructuralError):
        PolytreeState(load_network(os.path.join(FIXTURES, "netd.bnet")))


def test_fork_message_weighted_by_sibling_evidence():
    net = parse_network(FORK)
    state = PolytreeState(net, {1: 0})
    msg = state.pi_message(0, 2)
    # Pr(a and b1), recomputed from the oracle
    expected = [sum(oracle_marginals(net, {0: a, 1: 0})[0]) for a in range(2)]
    np.testing.assert_allclose(msg, expected)
    np.testing.assert_allclose(state.belief(2), oracle_marginals(net, {1: 0})[2])


def test_collider_without_evidence_sends_ones():
    state = PolytreeState(parse_network(COLLIDER))
    np.testing.assert_allclose(state.lambda_message(2, 0), [1, 1])
    np.testing.assert_allclose(state.lambda_message(2, 1), [1, 1])


def test_disconnected_components_multiply_evidence_mass():
    net = parse_network("var A 2 a1 a0\nvar B 2 b1 b0\ncpt A |\n0.3 0.7\ncpt B |\n0.6 0.4\n")
    np.testing.assert_allclose(polytree_belief(net, 0, {1: 1}), [0.3 * 0.4, 0.7 * 0.4])


def test_message_count_bounded_by_twice_edges():
    net = random_loopy(30, n_extra_edges=0, seed=4, card_range=(2, 3))
    state = PolytreeState(net, {3: 1})
    for x in range(len(net)):
        state.belief(x)
    assert state.messages_computed() <= 2 * len(net.edges())


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 10), seed=st.integers(0, 100_000), n_ev=st.integers(0, 3),
       ev_seed=st.integers(0, 1000))
def test_random_polytrees_match_oracle(n, seed, n_ev, ev_seed):
    net = random_loopy(n, n_extra_edges=0, seed=seed, card_range=(2, 4))
    rng = np.random.default_rng(ev_seed)
    vs = rng.choice(n, size=min(n_ev, n), replace=False)
    ev = {int(v): int(rng.integers(net.cards[v])) for v in vs}
    truth = oracle_marginals(net, ev)
    state = PolytreeState(net, ev)
    for x in range(n):
        np.testing.assert_allclose(state.belief(x), truth[x], rtol=1e-10, atol=1e-14)
