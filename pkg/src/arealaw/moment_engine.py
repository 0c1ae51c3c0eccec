"""Cost functionals on permutation tuples and their minimisation by scanning.

Two forms are used throughout:

* ``form="n"``: degree ``n``, reference cycle ``gamma_n``, bound ``X (n-1)``;
* ``form="nn"``: degree ``2n``, reference ``gamma_{n,n}``, bound ``X (2n-2)``.

Scans enumerate beta-tuples; the alpha-variables decouple per vertex, so for a
fixed beta the minimum over alpha is taken vertex by vertex from a precomputed
``(|S_m|, C)`` table. This is exact, and replaces an ``(m!)^{2k}`` scan by an
``(m!)^k`` one (or ``C^k`` when beta is restricted to a candidate set).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import perm_core as pc
from .flow_network import FlowResult, build_network, enumerate_max_flows, flow_result_from, max_flow
from .graph_model import FattenedGraph
from .perm_core import Permutation

TUPLE_CAP = 10**8
TABLE_DEGREE_CAP = 6  # dense (m!)^2 distance tables
CHUNK = 1 << 20


class ScanCapError(ValueError):
    pass


@dataclass(frozen=True)
class PermTuplePair:
    alphas: tuple[Permutation, ...]
    betas: tuple[Permutation, ...]

    def __post_init__(self):
        if len(self.alphas) != len(self.betas):
            raise ValueError("alphas and betas differ in length")
        degs = {p.n for p in self.alphas + self.betas}
        if len(degs) > 1:
            raise ValueError(f"mixed degrees {sorted(degs)}")

    @property
    def degree(self) -> int:
        return self.betas[0].n


def reference(form: str, n: int) -> Permutation:
    if form == "n":
        return pc.full_cycle(n)
    if form == "nn":
        return pc.double_cycle(n)
    raise ValueError(f"unknown form {form!r}")


def area(g: FattenedGraph) -> int:
    return max_flow(build_network(g, strict=False)).value


def lower_bound(g: FattenedGraph, n: int, form: str) -> int:
    return area(g) * pc.length(reference(form, n))


# --- scalar evaluation -------------------------------------------------------

def _check_k(g, perms):
    if len(perms) != g.k:
        raise ValueError(f"expected {g.k} permutations, got {len(perms)}")


def _beta_part(g, betas, gamma):
    _check_k(g, betas)
    gi = gamma.inverse()
    out = 0
    for i, b in enumerate(betas):
        out += g.s[i] * pc.length(pc.compose(gi, b)) + g.t[i] * pc.length(b)
    return out + _pair_part(g, betas)


def _pair_part(g, betas):
    return sum(e * pc.distance(betas[i], betas[j]) for (i, j), e in g.multiplicities.items())


def _full(g, pair: PermTuplePair, gamma):
    _check_k(g, pair.betas)
    gi = gamma.inverse()
    out = _pair_part(g, pair.betas)
    for i, (a, b) in enumerate(zip(pair.alphas, pair.betas)):
        if a.n != gamma.n:
            raise ValueError(f"degree {a.n} does not match reference degree {gamma.n}")
        out += (g.s[i] * pc.length(pc.compose(gi, a)) + g.t[i] * pc.length(a)
                + g.degrees[i] * pc.length(pc.compose(b, a.inverse())))
    return out


def _half(pair_or_betas) -> int:
    deg = pair_or_betas.degree if isinstance(pair_or_betas, PermTuplePair) else pair_or_betas[0].n
    if deg % 2:
        raise ValueError("the doubled functional needs an even degree")
    return deg // 2


def eval_F_nn(g: FattenedGraph, pair: PermTuplePair) -> int:
    return _full(g, pair, pc.double_cycle(_half(pair)))


def eval_F_nn_beta(g: FattenedGraph, betas: Sequence[Permutation]) -> int:
    return _beta_part(g, list(betas), pc.double_cycle(_half(betas)))


def eval_F_n(g: FattenedGraph, pair: PermTuplePair) -> int:
    return _full(g, pair, pc.full_cycle(pair.degree))


def eval_F_n_beta(g: FattenedGraph, betas: Sequence[Permutation]) -> int:
    return _beta_part(g, list(betas), pc.full_cycle(betas[0].n))


# --- tables ------------------------------------------------------------------

@dataclass
class Tables:
    """Length tables over ``S_m`` for a reference permutation ``gamma``.

    ``perms`` is all of ``S_m`` in lexicographic order; everything else is
    indexed into it.
    """

    gamma: Permutation
    perms: np.ndarray = field(init=False)
    len_id: np.ndarray = field(init=False)
    len_gamma: np.ndarray = field(init=False)
    dist: np.ndarray = field(init=False)
    connected: np.ndarray | None = field(init=False)
    id_index: int = field(init=False)
    gamma_index: int = field(init=False)

    def __post_init__(self):
        m = self.gamma.n
        if m > TABLE_DEGREE_CAP:
            raise ScanCapError(f"degree {m} exceeds table cap {TABLE_DEGREE_CAP}")
        self.perms = pc.all_permutations_array(m)
        g_arr = np.asarray(self.gamma.mapping, dtype=self.perms.dtype)
        self.len_id = pc.lengths_array(self.perms)
        self.len_gamma = pc.lengths_array(pc.compose_array(pc.inverse_array(g_arr), self.perms))
        self.dist = pc.distance_table(self.perms, self.perms)
        self.connected = pc.connected_mask_array(self.perms) if m % 2 == 0 else None
        self.id_index = 0
        self.gamma_index = int(np.flatnonzero((self.perms == g_arr).all(axis=1))[0])
        self.le = self.len_id[:, None] + self.dist == self.len_id[None, :]

    @property
    def size(self) -> int:
        return self.perms.shape[0]

    def interval(self) -> np.ndarray:
        """Indices of ``Id <= p <= gamma``."""
        return np.flatnonzero(self.len_id + self.len_gamma == self.len_id[self.gamma_index])

    def perm(self, idx) -> Permutation:
        return Permutation(tuple(int(x) for x in self.perms[idx]))

    def index_of(self, p: Permutation) -> int:
        return int(np.flatnonzero((self.perms == np.asarray(p.mapping)).all(axis=1))[0])

    def phi(self) -> np.ndarray:
        return np.array([pc.moebius_phi(self.perm(i)) for i in range(self.size)], dtype=np.int64)


_TABLES: dict[tuple[str, int], Tables] = {}


def tables(form: str, n: int) -> Tables:
    key = (form, n)
    if key not in _TABLES:
        _TABLES[key] = Tables(reference(form, n))
    return _TABLES[key]


@dataclass
class VertexCosts:
    """Per-vertex reductions over alpha for every beta in ``S_m``.

    ``beta_cost[b] = s|gamma^-1 b| + t|b|``; ``alpha_min[b]`` is the minimum
    over alpha of ``s|gamma^-1 a| + t|a| + d|b a^-1|``; ``alpha_count`` and
    ``alpha_phi`` are the number of minimising alphas and the sum of
    ``phi(b a^-1)`` over them; ``alpha_min_conn`` restricts alpha to connected
    permutations (``form="nn"`` only).
    """

    beta_cost: np.ndarray
    alpha_min: np.ndarray
    alpha_count: np.ndarray
    alpha_phi: np.ndarray
    alpha_min_conn: np.ndarray | None


def vertex_costs(tab: Tables, s: int, t: int) -> VertexCosts:
    d = s + t
    a_part = s * tab.len_gamma + t * tab.len_id  # indexed by alpha
    cost = a_part[:, None] + d * tab.dist  # [alpha, beta]; |b a^-1| = |a^-1 b|
    amin = cost.min(axis=0)
    at_min = cost == amin[None, :]
    # phi(b a^-1) depends only on the conjugacy class of a^-1 b
    phi_tab = _phi_of_quotient(tab)
    conn = None
    if tab.connected is not None:
        masked = np.where(tab.connected[:, None], cost, np.iinfo(np.int64).max)
        conn = masked.min(axis=0)
    return VertexCosts(
        beta_cost=a_part.copy(),
        alpha_min=amin,
        alpha_count=at_min.sum(axis=0),
        alpha_phi=np.where(at_min, phi_tab, 0).sum(axis=0),
        alpha_min_conn=conn,
    )


_PHI_Q: dict[tuple, np.ndarray] = {}


def _phi_of_quotient(tab: Tables) -> np.ndarray:
    """``Q[a, b] = phi(a^-1 b)``."""
    key = tab.gamma.mapping
    if key not in _PHI_Q:
        phi = tab.phi()
        inv = pc.inverse_array(tab.perms)
        prod = pc.compose_array(inv[:, None, :], tab.perms[None, :, :])
        # locate each product in the lexicographic table via a rank code
        m = tab.perms.shape[1]
        weights = (m ** np.arange(m - 1, -1, -1)).astype(np.int64)
        codes = tab.perms.astype(np.int64) @ weights
        order = np.argsort(codes)
        pos = order[np.searchsorted(codes[order], prod.astype(np.int64) @ weights)]
        _PHI_Q[key] = phi[pos]
    return _PHI_Q[key]


# --- tuple scan --------------------------------------------------------------

def _scan(g: FattenedGraph, tab: Tables, candidates: Sequence[np.ndarray],
          vertex_terms: Sequence[np.ndarray], cap: int = TUPLE_CAP, chunk: int = CHUNK):
    """Yield ``(idx, value)`` chunks over the product of per-vertex candidate lists.

    ``idx`` has shape ``(B, k)`` with indices into ``tab.perms``; ``value`` is
    ``sum_i vertex_terms[i][idx_i] + sum_{i<j} e_ij |b_i^-1 b_j|``.
    """
    shape = tuple(len(c) for c in candidates)
    total = int(np.prod(shape, dtype=object))
    if total > cap:
        raise ScanCapError(f"{total} tuples exceed scan cap {cap}")
    pairs = list(g.multiplicities.items())
    for start in range(0, total, chunk):
        flat = np.arange(start, min(total, start + chunk), dtype=np.int64)
        digits = np.unravel_index(flat, shape)
        idx = np.stack([candidates[i][digits[i]] for i in range(len(shape))], axis=1)
        val = np.zeros(len(flat), dtype=np.int64)
        for i in range(len(shape)):
            val += vertex_terms[i][idx[:, i]]
        for (i, j), e in pairs:
            val += e * tab.dist[idx[:, i], idx[:, j]]
        yield idx, val


def _pair_cost(g, tab, row) -> int:
    return sum(e * int(tab.dist[row[i], row[j]]) for (i, j), e in g.multiplicities.items())


def _candidates(tab: Tables, k: int, mode: str) -> list[np.ndarray]:
    if mode == "full":
        base = np.arange(tab.size)
    elif mode == "geodesic":
        base = tab.interval()
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return [base] * k


@dataclass
class MinResult:
    form: str
    n: int
    mode: str
    bound: int
    min_beta: int
    min_pair: int
    argmin_beta: list[tuple[int, ...]]
    argmin_pair: list[tuple[int, ...]]
    alpha_counts: list[int]
    tuples_scanned: int

    def betas(self, tab: Tables, which: str = "pair") -> list[tuple[Permutation, ...]]:
        rows = self.argmin_pair if which == "pair" else self.argmin_beta
        return [tuple(tab.perm(i) for i in row) for row in rows]


class _Argmin:
    reset_marker = object()

    def __init__(self, keep: int):
        self.keep = keep
        self.best = None
        self.rows: list[tuple[int, ...]] = []

    def update(self, idx, val):
        lo = int(val.min())
        reset = self.best is None or lo < self.best
        if reset:
            self.best, self.rows = lo, []
        elif lo > self.best:
            return None
        room = self.keep - len(self.rows)
        self.rows.extend(tuple(int(x) for x in r) for r in idx[val == lo][:max(room, 0)])
        return self.reset_marker if reset else True


def brute_min_F(g: FattenedGraph, n: int, mode: str = "geodesic", form: str = "nn",
                cap: int = TUPLE_CAP, keep_argmin: int = 10_000) -> MinResult:
    """Minimum of ``F(beta)`` and of ``F(alpha, beta)`` over beta-tuples.

    In ``full`` mode beta ranges over all of ``S_m``; ``geodesic`` restricts it
    to the interval ``Id <= beta <= gamma``. Alpha is always minimised exactly.
    Argmin lists are truncated at ``keep_argmin`` rows.
    """
    tab = tables(form, n)
    vc = [vertex_costs(tab, s, t) for s, t in zip(g.s, g.t)]
    cands = _candidates(tab, g.k, mode)
    acc_b, acc_p = _Argmin(keep_argmin), _Argmin(keep_argmin)
    counts: list[int] = []
    scanned = 0
    alpha_extra = [v.alpha_min - v.beta_cost for v in vc]
    for idx, val_b in _scan(g, tab, cands, [v.beta_cost for v in vc], cap):
        scanned += len(val_b)
        val_p = val_b + sum(alpha_extra[i][idx[:, i]] for i in range(g.k))
        acc_b.update(idx, val_b)
        kept = acc_p.update(idx, val_p)
        if kept is not None:
            if kept is acc_p.reset_marker:
                counts = []
            rows = acc_p.rows[len(counts):]
            if rows:
                r = np.array(rows)
                c = np.prod([vc[i].alpha_count[r[:, i]] for i in range(g.k)], axis=0)
                counts.extend(int(x) for x in np.atleast_1d(c))
    return MinResult(form=form, n=n, mode=mode, bound=lower_bound(g, n, form),
                     min_beta=acc_b.best, min_pair=acc_p.best, argmin_beta=acc_b.rows, argmin_pair=acc_p.rows,
                     alpha_counts=counts, tuples_scanned=scanned)


# --- limit moments -----------------------------------------------------------

@dataclass
class LimitMoment:
    n: int
    value: int
    beta_tuples: int
    pair_tuples: int
    mode: str


def _vertex_weight_geodesic(tab: Tables, s: int, t: int) -> np.ndarray:
    """Sum of ``phi(b a^-1)`` over the alpha-range allowed for each beta."""
    q = _phi_of_quotient(tab)
    if s > 0 and t > 0:
        return np.ones(tab.size, dtype=np.int64)
    if s == 0:
        allowed = tab.le  # [a, b]: a <= b, i.e. Id <= a <= b
    else:
        allowed = tab.le.T & tab.le[:, [tab.gamma_index]]  # b <= a <= gamma
    return np.where(allowed, q, 0).sum(axis=0)


def _vertex_count_geodesic(tab: Tables, s: int, t: int) -> np.ndarray:
    if s > 0 and t > 0:
        return np.ones(tab.size, dtype=np.int64)
    if s == 0:
        return tab.le.sum(axis=0)
    return (tab.le.T & tab.le[:, [tab.gamma_index]]).sum(axis=0)


def limit_moment(g: FattenedGraph, n: int, mode: str = "geodesic", cap: int = TUPLE_CAP) -> LimitMoment:
    """Large-N limit of ``N^{X(n-1)} E Tr rho_S^n``.

    The leading coefficient is the sum over minimising ``(alpha, beta)`` of
    ``prod_i phi(beta_i alpha_i^-1)``. ``geodesic`` mode enumerates beta in the
    interval and alpha by the per-vertex interval rule; ``full`` mode scans all
    of ``S_n`` for beta and takes alpha from the exact per-vertex minimum.
    """
    tab = tables("n", n)
    bound = lower_bound(g, n, "n")
    if mode == "geodesic":
        terms = [vertex_costs(tab, s, t).beta_cost for s, t in zip(g.s, g.t)]
        weights = [_vertex_weight_geodesic(tab, s, t) for s, t in zip(g.s, g.t)]
        counts = [_vertex_count_geodesic(tab, s, t) for s, t in zip(g.s, g.t)]
    elif mode == "full":
        vcs = [vertex_costs(tab, s, t) for s, t in zip(g.s, g.t)]
        terms = [v.alpha_min for v in vcs]
        weights = [v.alpha_phi for v in vcs]
        counts = [v.alpha_count for v in vcs]
    else:
        raise ValueError(f"unknown mode {mode!r}")
    value = beta_tuples = pair_tuples = 0
    for idx, val in _scan(g, tab, _candidates(tab, g.k, mode), terms, cap):
        if int(val.min()) < bound:
            raise AssertionError(f"functional below X(n-1)={bound}: {int(val.min())}")
        rows = idx[val == bound]
        if len(rows) == 0:
            continue
        w = np.ones(len(rows), dtype=object)
        c = np.ones(len(rows), dtype=object)
        for i in range(g.k):
            w = w * weights[i][rows[:, i]].astype(object)
            c = c * counts[i][rows[:, i]].astype(object)
        value += int(w.sum())
        pair_tuples += int(c.sum())
        beta_tuples += len(rows)
    return LimitMoment(n=n, value=value, beta_tuples=beta_tuples, pair_tuples=pair_tuples, mode=mode)


# --- minimiser characterisation ---------------------------------------------

def conditions_beta(tab: Tables, flow: FlowResult, idx: np.ndarray) -> np.ndarray:
    """Vectorised test of the path-ordering and residual conditions.

    ``idx`` is ``(B, k)`` of beta indices. Path condition: along every path of
    the decomposition, each beta lies below its predecessor (gamma at the
    source, Id at the sink). Residual condition: unused capacity on
    ``(beta_i, Id)`` forces ``beta_i = Id``, on ``(gamma, beta_i)`` forces
    ``beta_i = gamma``, and on ``{beta_i, beta_j}`` forces ``beta_i = beta_j``.
    """
    net = flow.network
    k = net.k
    B = idx.shape[0]

    def node_idx(u):
        if u == net.source:
            return np.full(B, tab.gamma_index)
        if u == net.sink:
            return np.full(B, tab.id_index)
        return idx[:, u - 1]

    ok = np.ones(B, dtype=bool)
    for path, _ in flow.paths:
        for u, v in zip(path, path[1:]):
            ok &= tab.le[node_idx(v), node_idx(u)]
    for i in range(1, k + 1):
        if flow.slack(i, net.sink) > 0:
            ok &= idx[:, i - 1] == tab.id_index
        if flow.slack(net.source, i) > 0:
            ok &= idx[:, i - 1] == tab.gamma_index
        for j in range(1, k + 1):
            if j != i and net.capacity[i, j] > 0 and flow.slack(i, j) > 0:
                ok &= idx[:, i - 1] == idx[:, j - 1]
    return ok


def conditions_alpha(tab: Tables, g: FattenedGraph, beta_idx: np.ndarray, alpha_idx: np.ndarray) -> np.ndarray:
    ok = np.ones(beta_idx.shape[0], dtype=bool)
    for i, (s, t) in enumerate(zip(g.s, g.t)):
        a, b = alpha_idx[:, i], beta_idx[:, i]
        if s > 0 and t > 0:
            ok &= a == b
        elif s == 0:
            ok &= tab.le[a, b]
        else:
            ok &= tab.le[b, a] & tab.le[a, tab.gamma_index]
    return ok


@dataclass
class CharacterizationReport:
    form: str
    n: int
    bound: int
    tuples: int
    below_bound: int
    beta_minimisers: int
    beta_mismatch_canonical: int
    beta_mismatch_any_flow: int
    canonical_vs_any_disagree: int
    flows_checked: int
    flows_complete: bool
    pair_tuples: int = 0
    pair_below_beta: int = 0
    pair_minimisers: int = 0
    pair_mismatch: int = 0

    @property
    def ok(self) -> bool:
        return (self.below_bound == 0 and self.beta_mismatch_canonical == 0
                and self.beta_mismatch_any_flow == 0 and self.pair_below_beta == 0
                and self.pair_mismatch == 0)


def check_characterization(g: FattenedGraph, n: int, form: str = "nn", pairs: bool = True,
                           cap: int = TUPLE_CAP, flow_limit: int = 64) -> CharacterizationReport:
    """Exhaustive check of the lower bound and its equality characterisation.

    Every beta-tuple in ``S_m^k`` is scanned; the minimum ``F(beta) = X|gamma|``
    is compared with the path/residual conditions for the canonical flow and
    for every enumerated maximum flow. With ``pairs=True`` the full
    ``(alpha, beta)`` product is scanned literally as well (``(m!)^{2k}`` work).
    """
    tab = tables(form, n)
    net = build_network(g, strict=False)
    canon = max_flow(net)
    flows, complete = enumerate_max_flows(net, flow_limit)
    # the canonical flow always takes part in the existence check
    results = [canon] + [flow_result_from(net, f) for f in flows]
    bound = canon.value * pc.length(tab.gamma)
    vc = [vertex_costs(tab, s, t) for s, t in zip(g.s, g.t)]
    rep = CharacterizationReport(form=form, n=n, bound=bound, tuples=0, below_bound=0,
                                 beta_minimisers=0, beta_mismatch_canonical=0,
                                 beta_mismatch_any_flow=0, canonical_vs_any_disagree=0,
                                 flows_checked=len(results), flows_complete=complete)
    cands = _candidates(tab, g.k, "full")
    for idx, val in _scan(g, tab, cands, [v.beta_cost for v in vc], cap):
        rep.tuples += len(val)
        rep.below_bound += int((val < bound).sum())
        is_min = val == bound
        rep.beta_minimisers += int(is_min.sum())
        c_ok = conditions_beta(tab, canon, idx)
        any_ok = np.zeros_like(c_ok)
        for fr in results:
            any_ok |= conditions_beta(tab, fr, idx)
        rep.beta_mismatch_canonical += int((c_ok != is_min).sum())
        rep.beta_mismatch_any_flow += int((any_ok != is_min).sum())
        rep.canonical_vs_any_disagree += int((c_ok != any_ok).sum())
    if pairs:
        m_fact = tab.size
        total = m_fact ** (2 * g.k)
        if total > cap:
            raise ScanCapError(f"{total} (alpha, beta) tuples exceed cap {cap}")
        full = np.arange(m_fact)
        a_idx = np.stack(np.unravel_index(np.arange(m_fact ** g.k), (m_fact,) * g.k), axis=1)
        for idx, val_b in _scan(g, tab, [full] * g.k, [v.beta_cost for v in vc], cap):
            for r in range(idx.shape[0]):
                b = np.broadcast_to(idx[r], a_idx.shape)
                val = np.full(a_idx.shape[0], _pair_cost(g, tab, idx[r]), dtype=np.int64)
                for i, (s, t) in enumerate(zip(g.s, g.t)):
                    val += (s * tab.len_gamma[a_idx[:, i]] + t * tab.len_id[a_idx[:, i]]
                            + (s + t) * tab.dist[a_idx[:, i], b[:, i]])
                rep.pair_tuples += len(val)
                rep.pair_below_beta += int((val < val_b[r]).sum())
                is_min = val == bound
                rep.pair_minimisers += int(is_min.sum())
                cond = conditions_beta(tab, canon, b) & conditions_alpha(tab, g, b, a_idx)
                rep.pair_mismatch += int((cond != is_min).sum())
    return rep


# --- connected tuples: the gap bound -----------------------------------------

@dataclass
class GapResult:
    n: int
    bound: int
    family: str
    beta_gap: int | None
    pair_gap: int | None
    beta_tuples: int
    pair_tuples: int

    @property
    def ok(self) -> bool:
        return all(x is None or x <= -2 for x in (self.beta_gap, self.pair_gap))


def _max_or(cur, new):
    return new if cur is None else max(cur, new)


def check_gap(g: FattenedGraph, n: int, cap: int = TUPLE_CAP, family: str = "auto") -> GapResult:
    """Largest ``X(2n-2) - F`` over tuples containing a connected permutation.

    ``family="exhaustive"`` scans every beta-tuple in ``S_{2n}^k`` (alpha
    eliminated exactly, with a connected alpha forced when no beta is
    connected). ``family="constrained"`` fixes one beta to range over the
    connected permutations and keeps the others in ``Id <= beta <= gamma``,
    plus the all-geodesic beta tuples with one connected alpha.
    ``auto`` picks exhaustive when ``(2n)!^k`` is within ``cap``.
    """
    tab = tables("nn", n)
    bound = lower_bound(g, n, "nn")
    vc = [vertex_costs(tab, s, t) for s, t in zip(g.s, g.t)]
    if family == "auto":
        family = "exhaustive" if tab.size ** g.k <= cap else "constrained"
    conn = tab.connected
    beta_gap = pair_gap = None
    nb = npair = 0
    extra_conn = [v.alpha_min_conn - v.alpha_min for v in vc]
    alpha_extra = [v.alpha_min - v.beta_cost for v in vc]

    def account(idx, val_b, need_alpha_conn):
        nonlocal beta_gap, pair_gap, nb, npair
        any_conn = conn[idx].any(axis=1)
        val_p = val_b + sum(alpha_extra[i][idx[:, i]] for i in range(g.k))
        if any_conn.any():
            nb += int(any_conn.sum())
            beta_gap = _max_or(beta_gap, bound - int(val_b[any_conn].min()))
            pair_gap = _max_or(pair_gap, bound - int(val_p[any_conn].min()))
            npair += int(any_conn.sum())
        if need_alpha_conn:
            rest = ~any_conn
            if rest.any():
                fix = np.min(np.stack([extra_conn[i][idx[rest, i]] for i in range(g.k)]), axis=0)
                pair_gap = _max_or(pair_gap, bound - int((val_p[rest] + fix).min()))
                npair += int(rest.sum())

    terms = [v.beta_cost for v in vc]
    if family == "exhaustive":
        for idx, val in _scan(g, tab, _candidates(tab, g.k, "full"), terms, cap):
            account(idx, val, True)
    elif family == "constrained":
        geo = tab.interval()
        conn_idx = np.flatnonzero(conn)
        for j in range(g.k):
            cands = [geo] * g.k
            cands[j] = conn_idx
            for idx, val in _scan(g, tab, cands, terms, cap):
                account(idx, val, False)
        for idx, val in _scan(g, tab, [geo] * g.k, terms, cap):
            account(idx, val, True)
    else:
        raise ValueError(f"unknown family {family!r}")
    return GapResult(n=n, bound=bound, family=family, beta_gap=beta_gap, pair_gap=pair_gap,
                     beta_tuples=nb, pair_tuples=npair)


def variance_gap_exponent(g: FattenedGraph, n: int, cap: int = TUPLE_CAP, family: str = "auto") -> int:
    """Leading exponent of N in the covariance bound at order ``n`` (must be <= -2)."""
    return check_gap(g, n, cap, family).pair_gap


def check_disconnect_additivity(g: FattenedGraph, n: int, samples: int = 1000, seed: int = 0,
                                cap: int = 10**4) -> tuple[bool, int]:
    """Compare the doubled functional with the sum of its two halves.

    Enumerates every tuple of block-diagonal ``(alpha, beta)`` when
    ``(n!)^{4k}`` is within ``cap``, otherwise draws ``samples`` of them.
    """
    half = pc.all_permutations(n)
    total = len(half) ** (4 * g.k)
    rng = np.random.default_rng(seed)

    def tuples():
        if total <= cap:
            for flat in range(total):
                yield np.unravel_index(flat, (len(half),) * (4 * g.k))
        else:
            for _ in range(samples):
                yield rng.integers(len(half), size=4 * g.k)

    checked = 0
    for pick in tuples():
        p = [half[int(x)] for x in pick]
        k = g.k
        a1, a2, b1, b2 = p[:k], p[k:2 * k], p[2 * k:3 * k], p[3 * k:]
        big = PermTuplePair(tuple(pc.join_halves(x, y) for x, y in zip(a1, a2)),
                            tuple(pc.join_halves(x, y) for x, y in zip(b1, b2)))
        lhs = eval_F_nn(g, big)
        rhs = eval_F_n(g, PermTuplePair(tuple(a1), tuple(b1))) + eval_F_n(g, PermTuplePair(tuple(a2), tuple(b2)))
        checked += 1
        if lhs != rhs:
            return False, checked
    return True, checked


# --- report ------------------------------------------------------------------

@dataclass
class OrderRecord:
    n: int
    limit_moment: int
    beta_minimisers: int
    pair_minimisers: int
    exact: dict[int, str] = field(default_factory=dict)
    gap_exponent: int | None = None


@dataclass
class MomentReport:
    graph: str
    area: int
    orders: list[OrderRecord]

    @property
    def moments(self) -> list[int]:
        return [o.limit_moment for o in self.orders]

    def to_dict(self) -> dict:
        return {
            "graph": self.graph,
            "area": self.area,
            "moments": self.moments,
            "orders": [vars(o) | {"exact": {str(k): v for k, v in o.exact.items()}} for o in self.orders],
        }


def moment_report(g: FattenedGraph, n_max: int, exact_N: Sequence[int] = (), gap: bool = True,
                  cap: int = TUPLE_CAP, gap_orders: Sequence[int] = (2,)) -> MomentReport:
    from .weingarten import exact_first_moment

    orders = []
    for n in range(1, n_max + 1):
        lm = limit_moment(g, n, cap=cap)
        rec = OrderRecord(n=n, limit_moment=lm.value, beta_minimisers=lm.beta_tuples,
                          pair_minimisers=lm.pair_tuples)
        for N in exact_N:
            try:
                rec.exact[N] = str(exact_first_moment(g, n, N))
            except ValueError:
                pass
        if gap and n in gap_orders:
            try:
                rec.gap_exponent = variance_gap_exponent(g, n, cap=cap)
            except ScanCapError:
                pass
        orders.append(rec)
    return MomentReport(graph=g.name, area=area(g), orders=orders)

