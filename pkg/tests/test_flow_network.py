import networkx as nx
import numpy as np
import pytest
from hypothesis import assume, given

from arealaw.flow_network import (FlowNetworkError, build_network, check_conservation, enumerate_max_flows,
                                  flow_result_from, max_flow, min_cut_value)
from arealaw.graph_model import FattenedGraph, brute_force_area, from_edges
from conftest import degrees_ok, small_graphs


def nx_max_flow(net):
    """Independent oracle: networkx preflow-push on the same capacities."""
    G = nx.DiGraph()
    G.add_nodes_from(range(net.size))
    for u, v, c in net.arcs():
        G.add_edge(u, v, capacity=c)
    return nx.maximum_flow_value(G, net.source, net.sink)


def test_chain_network(chain):
    net = build_network(chain)
    c = net.capacity
    assert net.size == 6
    assert (c[0, 2], c[0, 3], c[1, 5], c[3, 5], c[4, 5]) == (2, 1, 1, 1, 1)
    assert c[0, 1] == c[0, 4] == c[2, 5] == 0
    assert c[1, 2] == c[2, 1] == c[2, 3] == c[3, 4] == 1
    assert c[1, 3] == 0
    assert np.all(np.diagonal(c) == 0)


def test_lattice_network(lattice):
    net = build_network(lattice)
    c = net.capacity
    assert net.size == 11
    assert c[0, 5] == 4 and c[0, 4] == c[0, 6] == 1
    assert c[0].sum() == 6


def test_single_edge_network(single_edge):
    net = build_network(single_edge)
    assert [(u, v, c) for u, v, c in net.arcs()] == [(0, 1, 1), (1, 2, 1), (2, 1, 1), (2, 3, 1)]
    res = max_flow(net)
    assert res.value == 1
    assert res.paths == (((0, 1, 2, 3), 1),)


@pytest.mark.parametrize("name,X", [("chain", 3), ("lattice", 6), ("single-edge", 1), ("double-edge", 2)])
def test_bundled_max_flow(name, X):
    from arealaw.graph_model import load_graph
    g = load_graph(name)
    net = build_network(g)
    res = max_flow(net)
    assert res.value == X == nx_max_flow(net) == min_cut_value(net)
    assert sum(u for _, u in res.paths) == X
    assert check_conservation(net, res.flow)
    assert np.all(res.residual >= 0)


def test_zero_source():
    g = FattenedGraph(name="z", vertices=("a", "b"), multiplicities={(0, 1): 1}, s=(0, 0))
    with pytest.raises(FlowNetworkError):
        build_network(g)
    assert max_flow(build_network(g, strict=False)).value == 0


def test_unreachable_vertex():
    # vertex c has only sink capacity and no path from gamma
    g = from_edges("u", 4, [(0, 1), (2, 3)], [1, 0, 0, 0])
    with pytest.raises(FlowNetworkError, match="not on any"):
        build_network(g)


def test_determinism(lattice):
    a = max_flow(build_network(lattice))
    b = max_flow(build_network(lattice))
    assert a.paths == b.paths and a.augmentations == b.augmentations


@given(small_graphs())
def test_flow_equals_crossing_oracle(g):
    assume(degrees_ok(g, 4))
    net = build_network(g, strict=False)
    res = max_flow(net)
    X = brute_force_area(g)
    assert res.value == X
    assert res.value == nx_max_flow(net)
    assert res.value == min_cut_value(net)
    assert res.value <= min(sum(g.s), sum(g.t))


@given(small_graphs())
def test_decomposition_valid(g):
    assume(degrees_ok(g, 4))
    net = build_network(g, strict=False)
    res = max_flow(net)
    assert check_conservation(net, res.flow)
    rebuilt = np.zeros_like(res.flow)
    for path, units in res.paths:
        assert path[0] == net.source and path[-1] == net.sink
        assert len(set(path)) == len(path)
        for a, b in zip(path, path[1:]):
            rebuilt[a, b] += units
            rebuilt[b, a] -= units
    assert np.array_equal(rebuilt, res.flow)
    # no augmenting path remains
    from arealaw.flow_network import _bfs_path
    assert _bfs_path(res.residual, net.source, net.sink) is None


@given(small_graphs(max_k=4, max_degree=3, max_edges=5))
def test_enumerated_flows_are_maximal(g):
    assume(degrees_ok(g, 3))
    net = build_network(g, strict=False)
    X = max_flow(net).value
    flows, complete = enumerate_max_flows(net, limit=16)
    assert flows
    for f in flows:
        fr = flow_result_from(net, f)
        assert fr.value == X
        assert check_conservation(net, f)


def test_multiple_max_flows_triangle():
    g = from_edges("tri", 3, [(0, 1), (0, 2)], [1, 0, 0])
    flows, complete = enumerate_max_flows(build_network(g))
    # gamma->b0->Id, gamma->b0->b1->Id, gamma->b0->b2->Id
    assert complete and len(flows) == 3


def test_slack(chain):
    res = max_flow(build_network(chain))
    for u in range(res.network.size):
        for v in range(res.network.size):
            if res.network.capacity[u, v] > 0:
                assert 0 <= res.slack(u, v) <= res.network.capacity[u, v]
