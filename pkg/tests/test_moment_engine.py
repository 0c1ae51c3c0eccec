import itertools
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings

from arealaw import perm_core as pc
from arealaw import moment_engine as me
from arealaw.freepoisson import fp_moment
from arealaw.graph_model import from_edges, load_graph
from conftest import degrees_ok, small_graphs


def literal_F(g, alphas, betas, gamma):
    """Scalar oracle written straight from the definition of the functional."""
    gi = gamma.inverse()
    val = 0
    for i in range(g.k):
        val += g.s[i] * pc.length(pc.compose(gi, alphas[i])) + g.t[i] * pc.length(alphas[i])
        val += g.degrees[i] * pc.length(pc.compose(betas[i], alphas[i].inverse()))
    for (i, j), e in g.multiplicities.items():
        val += e * pc.length(pc.compose(betas[i].inverse(), betas[j]))
    return val


def literal_scan(g, gamma):
    """Minimum and phi-weighted minimiser sum over every (alpha, beta) in S_m^{2k}."""
    perms = pc.all_permutations(gamma.n)
    best, weight = None, 0
    for alphas in itertools.product(perms, repeat=g.k):
        for betas in itertools.product(perms, repeat=g.k):
            v = literal_F(g, alphas, betas, gamma)
            w = math.prod(pc.moebius_phi(pc.compose(b, a.inverse())) for a, b in zip(alphas, betas))
            if best is None or v < best:
                best, weight = v, w
            elif v == best:
                weight += w
    return best, weight


# --- scalar evaluation -------------------------------------------------------

def test_single_edge_values(single_edge):
    g3 = pc.full_cycle(3)
    idn = pc.identity(3)
    assert me.eval_F_n_beta(single_edge, [g3, idn]) == 2
    assert me.eval_F_n_beta(single_edge, [idn, idn]) == 2
    assert me.eval_F_n_beta(single_edge, [idn, g3]) == 6
    pair = me.PermTuplePair((g3, idn), (g3, idn))
    assert me.eval_F_n(single_edge, pair) == 2


def test_nn_form_uses_double_cycle(single_edge):
    g22 = pc.double_cycle(2)
    idn = pc.identity(4)
    assert me.eval_F_nn_beta(single_edge, [g22, idn]) == 2
    assert me.eval_F_nn(single_edge, me.PermTuplePair((g22, idn), (g22, idn))) == 2


def test_eval_rejects_bad_input(chain):
    with pytest.raises(ValueError):
        me.eval_F_n_beta(chain, [pc.identity(2)] * 3)
    with pytest.raises(ValueError):
        me.PermTuplePair((pc.identity(2),), (pc.identity(3),))
    with pytest.raises(ValueError):
        me.eval_F_nn_beta(chain, [pc.identity(3)] * 4)


def test_beta_functional_is_alpha_equal_beta(chain):
    perms = pc.all_permutations(3)
    rng = np.random.default_rng(1)
    for _ in range(20):
        b = tuple(perms[i] for i in rng.integers(len(perms), size=chain.k))
        assert me.eval_F_n(chain, me.PermTuplePair(b, b)) == me.eval_F_n_beta(chain, b)


# --- minimisation ------------------------------------------------------------

@pytest.mark.parametrize("name,n,form,expected", [
    ("single-edge", 2, "nn", 2), ("single-edge", 3, "n", 2), ("chain", 2, "nn", 6),
    ("chain", 3, "n", 6), ("double-edge", 2, "nn", 4),
])
def test_brute_min(name, n, form, expected):
    g = load_graph(name)
    res = me.brute_min_F(g, n, mode="full", form=form)
    assert res.bound == res.min_beta == res.min_pair == expected


def test_lattice_min_geodesic(lattice):
    res = me.brute_min_F(lattice, 2, mode="geodesic", form="nn")
    assert res.min_pair == res.min_beta == res.bound == 12
    tab = me.tables("nn", 2)
    # the three vertices carrying s touch the source, the rest sit at Id
    for row in res.betas(tab, "beta"):
        for i in (0, 1, 2, 6, 7, 8):
            assert row[i] == pc.identity(4)


@pytest.mark.parametrize("name,n", [("single-edge", 2), ("single-edge", 3), ("chain", 2), ("double-edge", 2)])
def test_min_against_literal_scan(name, n):
    g = load_graph(name)
    best, weight = literal_scan(g, pc.full_cycle(n))
    assert best == me.brute_min_F(g, n, mode="full", form="n").min_pair
    assert weight == me.limit_moment(g, n, mode="full").value


@settings(max_examples=25)
@given(small_graphs(max_k=3, max_degree=3, max_edges=4))
def test_random_min_against_literal_scan(g):
    assume(degrees_ok(g, 3))
    best, weight = literal_scan(g, pc.full_cycle(2))
    assert best == me.lower_bound(g, 2, "n")
    assert me.limit_moment(g, 2, mode="full").value == weight
    assert me.limit_moment(g, 2, mode="geodesic").value == weight


# --- limit moments -----------------------------------------------------------

def test_chain_catalan(chain):
    vals = [me.limit_moment(chain, n).value for n in range(1, 6)]
    assert vals == [1, 2, 5, 14, 42]
    assert vals == [fp_moment(1, n) for n in range(1, 6)]


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_chain_geodesic_matches_full(chain, n):
    assert me.limit_moment(chain, n, "geodesic").value == me.limit_moment(chain, n, "full").value


def test_lattice_moments(lattice):
    assert [me.limit_moment(lattice, n).value for n in (1, 2, 3)] == [1, 1, 1]


@pytest.mark.parametrize("name", ["single-edge", "double-edge"])
def test_edge_graphs_have_unit_moments(name):
    g = load_graph(name)
    assert [me.limit_moment(g, n).value for n in range(1, 5)] == [1, 1, 1, 1]


def test_unweighted_counts_reported(chain):
    lm = me.limit_moment(chain, 2)
    assert lm.beta_tuples >= 1 and lm.pair_tuples >= lm.beta_tuples


def test_cap(chain):
    with pytest.raises(me.ScanCapError):
        me.limit_moment(chain, 3, mode="full", cap=100)
    with pytest.raises(me.ScanCapError):
        me.tables("nn", 4)


# --- characterisation --------------------------------------------------------

@pytest.mark.parametrize("name", ["single-edge", "double-edge"])
def test_characterization_pairs(name):
    rep = me.check_characterization(load_graph(name), 2, "nn", pairs=True)
    assert rep.ok, rep
    assert rep.pair_tuples == 24 ** 4


@pytest.mark.parametrize("n", [2, 3, 4])
def test_characterization_chain_form_n(chain, n):
    rep = me.check_characterization(chain, n, "n", pairs=False)
    assert rep.ok and rep.below_bound == 0 and rep.beta_minimisers > 0


@settings(max_examples=20)
@given(small_graphs(max_k=3, max_degree=3, max_edges=4))
def test_characterization_random(g):
    assume(degrees_ok(g, 3))
    for n in (2, 3):
        rep = me.check_characterization(g, n, "n", pairs=False)
        assert rep.ok, rep


def test_conditions_on_lattice_flow(lattice):
    tab = me.tables("n", 2)
    flow = me.max_flow(me.build_network(lattice))
    ident, gam = tab.id_index, tab.gamma_index
    ok_row = np.array([[ident] * 4 + [gam] + [ident] * 4])
    bad_row = np.array([[ident] * 3 + [gam] * 3 + [ident] * 3])
    assert not me.conditions_beta(tab, flow, bad_row)[0]
    assert me.conditions_beta(tab, flow, ok_row)[0]
    assert me.eval_F_n_beta(lattice, [tab.perm(i) for i in ok_row[0]]) == 6


# --- gap ---------------------------------------------------------------------

@pytest.mark.parametrize("name,gap", [("single-edge", -2), ("double-edge", -4)])
def test_gap_edges(name, gap):
    res = me.check_gap(load_graph(name), 2, family="exhaustive")
    assert res.ok
    assert res.pair_gap == gap
    assert res.beta_gap <= -2


def test_gap_families_agree_on_single_edge(single_edge):
    ex = me.check_gap(single_edge, 2, family="exhaustive")
    co = me.check_gap(single_edge, 2, family="constrained")
    assert co.ok and co.pair_gap <= ex.pair_gap


def test_gap_bad_family(single_edge):
    with pytest.raises(ValueError):
        me.check_gap(single_edge, 2, family="nope")


# --- additivity and report ---------------------------------------------------

@pytest.mark.parametrize("name", ["single-edge", "chain", "double-edge"])
def test_disconnect_additivity(name):
    ok, checked = me.check_disconnect_additivity(load_graph(name), 2, samples=200)
    assert ok and checked > 0


def test_moment_report(chain):
    rep = me.moment_report(chain, 3, exact_N=(2,), gap=False)
    d = rep.to_dict()
    assert d["moments"] == [1, 2, 5] and d["area"] == 3
    assert d["orders"][0]["exact"]["2"] == "1"


def test_interval_is_noncrossing():
    for n in range(1, 6):
        tab = me.tables("n", n)
        assert len(tab.interval()) == pc.catalan(n)
        assert all(pc.is_noncrossing(tab.perm(i)) for i in tab.interval())


def test_triangle_graph_bound():
    g = from_edges("tri", 3, [(0, 1), (1, 2), (0, 2)], [2, 0, 0])
    assert me.area(g) == 2
    assert me.brute_min_F(g, 3, "full", "n").min_pair == 4
