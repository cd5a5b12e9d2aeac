import numpy as np
import pytest

from dyncond.bnet import parse_network, serialize_network
from dyncond.errors import NetworkError
from dyncond.netgen import GeneratorSpec, diamond_ladder, n_bit_adder, random_loopy
from dyncond.network import is_singly_connected, oracle_marginals
from dyncond.dynamic import dc_belief_all


def test_ladder_shape():
    net = diamond_ladder(4, seed=3)
    assert len(net) == 13 and len(net.edges()) == 16
    assert all(card == 2 for card in net.cards)
    for cpt in net.cpts:
        assert cpt.table.min() >= 0.05 and cpt.table.max() <= 0.95


def test_single_diamond_is_netd_shape():
    net = diamond_ladder(1)
    assert len(net) == 4
    assert sorted(net.edges()) == [(0, 1), (0, 2), (1, 3), (2, 3)]


def test_generators_are_deterministic():
    for spec in (GeneratorSpec("diamond-ladder", 3, seed=9), GeneratorSpec("adder", 2, seed=9),
                 GeneratorSpec("random", 10, seed=9, max_card=3)):
        assert serialize_network(spec.build()) == serialize_network(spec.build())
    assert serialize_network(diamond_ladder(3, 1)) != serialize_network(diamond_ladder(3, 2))


def test_ladder_marginals_match_engine():
    net = diamond_ladder(3, seed=4)
    beliefs, _ = dc_belief_all(net)
    truth = oracle_marginals(net)
    for x in range(len(net)):
        np.testing.assert_allclose(beliefs[x], truth[x], atol=1e-15)


def test_noiseless_adder_truth_tables():
    net = n_bit_adder(1, noise=0.0)
    s, c = net.index("Sum_0"), net.index("Carry_0")
    for row, (a, b) in enumerate([(0, 0), (0, 1), (1, 0), (1, 1)]):
        assert net.cpts[s].table[row].tolist() == [1 - (a ^ b), a ^ b]
        assert net.cpts[c].table[row].tolist() == [1 - (a & b), a & b]


def test_adder_adds():
    net = n_bit_adder(3, noise=0.0, inputs={"In1_0": 1, "In1_1": 1, "In1_2": 0,
                                             "In2_0": 1, "In2_1": 0, "In2_2": 1})
    truth = oracle_marginals(net)
    total = sum(int(np.argmax(truth[net.index(f"Sum_{i}")])) << i for i in range(3))
    total += int(np.argmax(truth[net.index("Carry_2")])) << 3
    assert total == 3 + 5


def test_noisy_adder_matches_engine():
    net = n_bit_adder(2, noise=0.01, seed=5)
    beliefs, _ = dc_belief_all(net)
    truth = oracle_marginals(net)
    for x in range(len(net)):
        np.testing.assert_allclose(beliefs[x], truth[x], atol=1e-15)


def test_random_loopy_properties():
    assert is_singly_connected(random_loopy(15, n_extra_edges=0, seed=1))
    net = random_loopy(12, n_extra_edges=3, seed=1, card_range=(2, 4))
    assert not is_singly_connected(net)
    assert len(net.edges()) == 11 + 3
    assert all(len(p) <= 3 for p in net.parents)
    assert set(net.cards) <= {2, 3, 4}
    oracle_marginals(net)


def test_zero_fraction_keeps_rows_normalized():
    net = random_loopy(10, n_extra_edges=2, seed=3, card_range=(3, 3), zero_fraction=0.5)
    assert any((cpt.table == 0).any() for cpt in net.cpts)
    for cpt in net.cpts:
        np.testing.assert_allclose(cpt.table.sum(axis=1), 1.0)


def test_generator_errors():
    with pytest.raises(NetworkError):
        diamond_ladder(0)
    with pytest.raises(NetworkError):
        n_bit_adder(2, noise=0.7)
    with pytest.raises(NetworkError):
        random_loopy(3, n_extra_edges=5, seed=0)
    with pytest.raises(NetworkError):
        GeneratorSpec("mesh", 3).build()


def test_generated_round_trip():
    for net in (diamond_ladder(5), n_bit_adder(3, 0.01), random_loopy(11, 3, 3, 4, (2, 4))):
        assert parse_network(serialize_network(net)) == net
