import pytest

from rplsim import topology
from rplsim.engine import Engine, RngStreams
from rplsim.radio import LinkModel, Medium


def adjacency(positions, tx_range):
    m = Medium(Engine(), RngStreams(1), positions, LinkModel(tx_range=tx_range))
    return m


def test_grid51_has_51_nodes_inside_the_area():
    for level in (1, 2, 3):
        pos = topology.grid51(level)
        assert len(pos) == 51
        assert all(0 <= p.x <= 100 and 0 <= p.y <= 100 for p in pos.values())
        assert pos[1] == topology.grid51(level)[1]  # root slot is fixed


def test_grid51_is_connected_with_useful_depth():
    pos = topology.grid51(3)
    assert topology.is_connected(pos, topology.GRID51_TX_RANGE)
    hops = topology.hop_counts(pos, topology.GRID51_TX_RANGE, 1)
    assert max(hops.values()) >= 3  # deep enough for a level-3 placement
    m = adjacency(pos, topology.GRID51_TX_RANGE)
    assert 1 <= len(m.neighbors(1)) < 50


def test_grid51_attacker_slots_sit_at_their_levels():
    from rplsim.attack import classify_placement
    for level in (1, 2, 3):
        pos = topology.grid51(level)
        m = adjacency(pos, topology.GRID51_TX_RANGE)
        assert classify_placement(m.neighbors, 1, 51) == level


def test_small11_shape():
    pos = topology.small11()
    assert len(pos) == 11
    m = adjacency(pos, topology.SMALL11_TX_RANGE)
    assert m.neighbors(11) == (8, 9, 10)  # attacker reaches the last tier only
    assert m.neighbors(1) == (2, 3, 4)
    hops = topology.hop_counts(pos, topology.SMALL11_TX_RANGE, 1)
    assert [hops[n] for n in range(2, 11)] == [1, 1, 1, 2, 2, 2, 3, 3, 3]
    assert hops[11] == 4


def test_random_topology_is_deterministic_and_connected():
    a = topology.random_topology(51, 100.0, seed=7, tx_range=30.0)
    b = topology.random_topology(51, 100.0, seed=7, tx_range=30.0)
    assert a == b
    assert topology.is_connected(a, 30.0)
    c = topology.random_topology(51, 100.0, seed=8, tx_range=30.0)
    assert c != a


def test_random_topology_impossible_spec_raises():
    with pytest.raises(topology.TopologyError):
        topology.random_topology(40, 1000.0, seed=1, tx_range=5.0, max_tries=5)


def test_attacker_placement_search_matches_requested_level():
    from rplsim.attack import classify_placement
    base = topology.random_topology(20, 100.0, seed=3, tx_range=30.0)
    for level in (1, 2):
        placed = topology.place_attacker(base, 30.0, 1, 20, level, seed=3)
        m = adjacency(placed, 30.0)
        assert classify_placement(m.neighbors, 1, 20) == level


def test_topology_file_round_trip(tmp_path):
    pos = topology.small11()
    path = tmp_path / "topo.txt"
    topology.write_topology_file(path, pos)
    back = topology.read_topology_file(path)
    assert set(back) == set(pos)
    for nid in pos:
        assert back[nid].x == pytest.approx(pos[nid].x, abs=1e-3)
        assert back[nid].y == pytest.approx(pos[nid].y, abs=1e-3)


def test_topology_file_rejects_garbage(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("1 2\n")
    with pytest.raises(topology.TopologyError):
        topology.read_topology_file(path)
    path.write_text("1 0 0\n1 5 5\n")
    with pytest.raises(topology.TopologyError):
        topology.read_topology_file(path)
