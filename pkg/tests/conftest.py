import os

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from arealaw.graph_model import FattenedGraph, load_graph

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def chain():
    return load_graph("chain")


@pytest.fixture(scope="session")
def lattice():
    return load_graph("lattice")


@pytest.fixture(scope="session")
def single_edge():
    return load_graph("single-edge")


@pytest.fixture(scope="session")
def double_edge():
    return load_graph("double-edge")


@st.composite
def small_graphs(draw, max_k=5, max_degree=4, max_edges=8):
    """Loop-free multigraphs with every degree in 1..max_degree and a random split."""
    k = draw(st.integers(2, max_k))
    deg = [0] * k
    mult = {}
    n_edges = draw(st.integers(1, max_edges))
    for _ in range(n_edges):
        i = draw(st.integers(0, k - 1))
        j = draw(st.integers(0, k - 1))
        if i == j or deg[i] >= max_degree or deg[j] >= max_degree:
            continue
        key = (min(i, j), max(i, j))
        mult[key] = mult.get(key, 0) + 1
        deg[i] += 1
        deg[j] += 1
    # attach isolated vertices to a neighbour with spare degree
    for v in range(k):
        if deg[v] == 0:
            w = next((u for u in range(k) if u != v and deg[u] < max_degree), None)
            if w is None:
                w = (v + 1) % k
            key = (min(v, w), max(v, w))
            mult[key] = mult.get(key, 0) + 1
            deg[v] += 1
            deg[w] += 1
    s = [draw(st.integers(0, d)) for d in deg]
    return FattenedGraph(name="random", vertices=tuple(str(v + 1) for v in range(k)),
                         multiplicities=mult, s=tuple(s))


def degrees_ok(g, max_degree):
    return max(g.degrees) <= max_degree
