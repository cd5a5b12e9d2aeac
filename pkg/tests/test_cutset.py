import os
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FIXTURES
from dyncond.bnet import load_network
from dyncond.cutset import (CutsetConditioning, absorb_arcs, condition, cutset_conditioning_belief,
                            cutset_instantiations, find_loop_cutset, is_loop_cutset,
                            validate_cutset)
from dyncond.errors import StructuralError
from dyncond.netgen import diamond_ladder, n_bit_adder, random_loopy
from dyncond.network import is_singly_connected, oracle_marginals


@pytest.fixture
def neta():
    return load_network(os.path.join(FIXTURES, "neta.bnet"))


@pytest.fixture
def netd():
    return load_network(os.path.join(FIXTURES, "netd.bnet"))


def minimum_cutset_size(net):
    for size in range(len(net) + 1):
        if any(is_loop_cutset(net, c) for c in combinations(range(len(net)), size)):
            return size


def test_find_cutset_examples(neta, netd):
    assert find_loop_cutset(neta) == ()
    found = find_loop_cutset(netd)
    assert len(found) == 1
    for v in range(3):
        assert is_loop_cutset(netd, (v,))
    assert not is_loop_cutset(netd, (3,))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_ladder_cutset_is_minimal(k):
    net = diamond_ladder(k)
    assert len(find_loop_cutset(net)) == k == minimum_cutset_size(net)


@pytest.mark.parametrize("k", [5, 12, 30])
def test_ladder_cutset_size(k):
    net = diamond_ladder(k)
    cutset = find_loop_cutset(net)
    assert len(cutset) == k and is_loop_cutset(net, cutset)


def test_adder_cutset_matches_cycle_rank():
    for n in (1, 2):
        net = n_bit_adder(n)
        assert len(find_loop_cutset(net)) == 2 * n - 1 == minimum_cutset_size(net)
    net = n_bit_adder(3)
    assert not any(is_loop_cutset(net, c) for c in combinations(range(len(net)), 2))
    for n in (4, 8):
        assert len(find_loop_cutset(n_bit_adder(n))) == 2 * n - 1


def test_validate_rejects_non_cutset(netd):
    with pytest.raises(StructuralError):
        validate_cutset(netd, (3,))
    with pytest.raises(StructuralError):
        validate_cutset(netd, ())


def test_absorption_on_diamond(netd):
    assert absorb_arcs(netd, (0,)) == {(0, 2)}


def test_condition_diamond(netd):
    for a, prior in ((0, [0.6, 0.4]), (1, [0.4, 0.6])):
        cond = condition(netd, (0,), {0: a})
        assert cond.absorbed == {(0, 2)}
        assert cond.network.parents[2] == ()
        assert cond.network.parents[1] == (0,)
        np.testing.assert_allclose(cond.network.cpts[2].table, [prior])
        assert is_singly_connected(cond.network)
        expected = [0.0, 0.0]
        expected[a] = 1.0
        np.testing.assert_allclose(cond.weights[0], expected)


def test_condition_structure_independent_of_values():
    net = diamond_ladder(3, seed=1)
    cutset = find_loop_cutset(net)
    shapes = {tuple(condition(net, cutset, c).network.edges())
              for c in cutset_instantiations(net, cutset)}
    assert len(shapes) == 1


def test_condition_polytree_is_identity(neta):
    cond = condition(neta, (), {})
    assert cond.network == neta
    assert cond.absorbed == frozenset()


def test_instantiation_order():
    net = random_loopy(6, n_extra_edges=2, seed=2, card_range=(2, 3))
    cutset = find_loop_cutset(net)
    insts = [tuple(c[v] for v in cutset) for c in cutset_instantiations(net, cutset)]
    assert insts == sorted(insts)
    assert len(insts) == int(np.prod([net.cards[v] for v in cutset]))


def test_cutset_conditioning_examples(neta, netd):
    bel, cases = cutset_conditioning_belief(netd, 3)
    np.testing.assert_allclose(bel, [0.7145, 0.2855])
    assert cases == 2
    bel, cases = cutset_conditioning_belief(neta, 1)
    np.testing.assert_allclose(bel, [0.41, 0.59])
    assert cases == 1


def test_ladder_ten_needs_1024_cases():
    net = diamond_ladder(10)
    _, cases = cutset_conditioning_belief(net, len(net) - 1)
    assert cases == 1024


def test_user_cutset_is_honoured(netd):
    engine = CutsetConditioning(netd, cutset=(1,))
    bel = engine.beliefs({3: 0}, [0])[0]
    np.testing.assert_allclose(bel, oracle_marginals(netd, {3: 0})[0])
    assert engine.cutset == (1,)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(3, 9), extra=st.integers(1, 3), seed=st.integers(0, 100_000))
def test_random_loopy_matches_oracle(n, extra, seed):
    extra = min(extra, n * (n - 1) // 2 - n + 1)
    net = random_loopy(n, n_extra_edges=extra, seed=seed, card_range=(2, 3))
    ev = {n - 1: 0}
    truth = oracle_marginals(net, ev)
    beliefs = CutsetConditioning(net).beliefs(ev)
    for x in range(n):
        np.testing.assert_allclose(beliefs[x], truth[x], rtol=1e-10, atol=1e-14)
