"""Tests for network construction and neighbor queries."""

import numpy as np
import pytest

from digp.topology import (
    Topology,
    ring_topology,
    random_topology,
    watts_strogatz,
)


# ---------------------------------------------------------------------------
# rings
# ---------------------------------------------------------------------------

def test_ring_degree_one_external_neighbors():
    top = ring_topology(10, 1)
    for l in range(10):
        assert top.external_out(l) == ((l + 1) % 10,)


def test_ring_degree_zero_is_disconnected():
    top = ring_topology(5, 0)
    for l in range(5):
        assert list(top.out_neighbors(l)) == [l]
        assert list(top.in_neighbors(l)) == [l]


def test_ring_full_degree_reaches_everyone():
    top = ring_topology(6, 5)
    for l in range(6):
        assert sorted(top.in_neighbors(l)) == list(range(6))
        assert sorted(top.out_neighbors(l)) == list(range(6))


def test_ring_wraparound():
    top = ring_topology(7, 3)
    assert top.external_out(5) == (6, 0, 1)


def test_ring_nesting():
    for d in range(4):
        small = ring_topology(9, d)
        big = ring_topology(9, d + 1)
        for l in range(9):
            assert set(small.external_out(l)) <= set(big.external_out(l))


def test_ring_rejects_degree_out_of_range():
    with pytest.raises(ValueError):
        ring_topology(5, 5)
    with pytest.raises(ValueError):
        ring_topology(5, -1)


def test_self_membership_everywhere():
    tops = [ring_topology(8, 2),
            random_topology(8, 3, np.random.default_rng(0)),
            watts_strogatz(12, 2, 0.5, np.random.default_rng(1))]
    for top in tops:
        for l in range(top.n_nodes):
            assert l in top.in_neighbors(l)
            assert l in top.out_neighbors(l)
            assert l not in top.external_out(l)


# ---------------------------------------------------------------------------
# random topologies
# ---------------------------------------------------------------------------

def test_random_topology_exact_out_degree():
    rng = np.random.default_rng(2)
    for d in (2, 4, 7):
        top = random_topology(12, d, rng)
        for l in range(12):
            ext = top.external_out(l)
            assert len(ext) == d
            assert len(set(ext)) == d
            assert l not in ext
            assert (l + 1) % 12 in ext  # the ring backbone stays


def test_random_topology_in_degree_handshake():
    top = random_topology(15, 3, np.random.default_rng(3))
    total_in = sum(len(top.in_neighbors(l)) - 1 for l in range(15))
    assert total_in == 15 * 3


def test_random_topology_full_degree_is_complete():
    top = random_topology(10, 9, np.random.default_rng(4))
    ring = ring_topology(10, 9)
    for l in range(10):
        assert sorted(top.external_out(l)) == sorted(ring.external_out(l))


def test_random_topology_deterministic():
    a = random_topology(20, 4, np.random.default_rng(5))
    b = random_topology(20, 4, np.random.default_rng(5))
    assert a.out_edges == b.out_edges


def test_random_topology_rejects_small_degree():
    with pytest.raises(ValueError):
        random_topology(10, 1, np.random.default_rng(0))


# ---------------------------------------------------------------------------
# small-world graphs
# ---------------------------------------------------------------------------

def test_watts_strogatz_no_rewiring_is_ring_lattice():
    top = watts_strogatz(10, 2, 0.0, np.random.default_rng(6))
    for l in range(10):
        expected = sorted(((l + j) % 10 for j in (-2, -1, 1, 2)))
        assert sorted(top.external_out(l)) == expected
        assert sorted(top.in_neighbors(l)) == sorted(top.out_neighbors(l))


def test_watts_strogatz_edge_count_preserved():
    for p in (0.0, 0.3, 1.0):
        top = watts_strogatz(30, 3, p, np.random.default_rng(7))
        directed = sum(len(top.external_out(l)) for l in range(30))
        assert directed == 2 * 30 * 3  # each undirected edge counted twice


def test_watts_strogatz_is_symmetric():
    top = watts_strogatz(25, 3, 0.3, np.random.default_rng(8))
    for l in range(25):
        for dst in top.external_out(l):
            assert l in top.external_out(dst)


def test_watts_strogatz_rewires_something():
    lattice = watts_strogatz(40, 3, 0.0, np.random.default_rng(9))
    rewired = watts_strogatz(40, 3, 0.9, np.random.default_rng(9))
    assert lattice.out_edges != rewired.out_edges


def test_watts_strogatz_no_self_loops_or_duplicates():
    top = watts_strogatz(20, 4, 1.0, np.random.default_rng(10))
    for l in range(20):
        ext = top.external_out(l)
        assert l not in ext
        assert len(ext) == len(set(ext))


def test_watts_strogatz_parameter_validation():
    rng = np.random.default_rng(11)
    with pytest.raises(ValueError):
        watts_strogatz(10, 5, 0.3, rng)  # 2q > L-1
    with pytest.raises(ValueError):
        watts_strogatz(10, 0, 0.3, rng)
    with pytest.raises(ValueError):
        watts_strogatz(10, 2, 1.5, rng)


def test_watts_strogatz_deterministic():
    a = watts_strogatz(50, 3, 0.3, np.random.default_rng(12))
    b = watts_strogatz(50, 3, 0.3, np.random.default_rng(12))
    assert a.out_edges == b.out_edges


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def test_text_round_trip():
    top = random_topology(9, 3, np.random.default_rng(13))
    text = top.to_text()
    back = Topology.from_text(text)
    assert back.n_nodes == 9
    assert back.out_edges == top.out_edges


def test_text_format_shape():
    top = ring_topology(3, 1)
    assert top.to_text().splitlines() == ["0: 1", "1: 2", "2: 0"]


def test_from_text_rejects_bad_node_ids():
    with pytest.raises(ValueError):
        Topology.from_text("0: 1\n1: 5\n")
