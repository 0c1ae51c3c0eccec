"""Exact Weingarten functions and exact finite-N moments of the marginal.

``Wg(N, .)`` is the inverse of the Gram matrix ``G[a, b] = N^{#(a b^-1)}`` on
``S_n`` applied to the identity indicator. Being a class function, it is found
from a ``p(n) x p(n)`` system in exact rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

import numpy as np

from . import perm_core as pc
from .graph_model import FattenedGraph
from .moment_engine import area, reference

WG_DEGREE_CAP = 6
MOMENT_WORK_CAP = 10**8


class WeingartenError(ValueError):
    pass


def solve_exact(a: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    """Gaussian elimination over the rationals with partial (nonzero) pivoting."""
    n = len(a)
    m = [list(map(Fraction, row)) + [Fraction(rhs)] for row, rhs in zip(a, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise WeingartenError("singular system")
        m[col], m[piv] = m[piv], m[col]
        p = m[col][col]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col] / p
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [m[i][n] / m[i][i] for i in range(n)]


@lru_cache(maxsize=None)
def _class_data(n: int):
    """Cycle types, class index per permutation, and cycle-count histograms.

    ``hist[l][c][j]`` is the number of ``tau`` of type ``c`` with
    ``#(sigma_l tau^-1) = j`` for a fixed representative ``sigma_l``.
    """
    perms = pc.all_permutations(n)
    types = sorted({p.cycle_type() for p in perms}, reverse=True)
    pos = {ct: i for i, ct in enumerate(types)}
    cls = [pos[p.cycle_type()] for p in perms]
    reps = [next(p for p in perms if p.cycle_type() == ct) for ct in types]
    hist = np.zeros((len(types), len(types), n + 1), dtype=np.int64)
    for l, sigma in enumerate(reps):
        for tau, c in zip(perms, cls):
            hist[l, c, pc.compose(sigma, tau.inverse()).cycle_count()] += 1
    return tuple(types), tuple(cls), hist


@dataclass(frozen=True)
class WeingartenTable:
    n: int
    N: int
    values: Mapping[tuple[int, ...], Fraction]

    def __call__(self, p: pc.Permutation) -> Fraction:
        return self.values[p.cycle_type()]


@lru_cache(maxsize=None)
def wg_table(N: int, n: int) -> WeingartenTable:
    if n < 1 or n > WG_DEGREE_CAP:
        raise WeingartenError(f"degree {n} outside 1..{WG_DEGREE_CAP}")
    if N < n:
        raise WeingartenError(f"N={N} < n={n}: Gram matrix is singular")
    types, _, hist = _class_data(n)
    powers = [Fraction(N) ** j for j in range(n + 1)]
    a = [[sum(int(hist[l, c, j]) * powers[j] for j in range(n + 1)) for c in range(len(types))]
         for l in range(len(types))]
    rhs = [Fraction(int(ct == (1,) * n)) for ct in types]
    sol = solve_exact(a, rhs)
    return WeingartenTable(n=n, N=N, values=dict(zip(types, sol)))


def wg(N: int, p: pc.Permutation) -> Fraction:
    return wg_table(N, p.n)(p)


moebius_phi = pc.moebius_phi


def wg_vector(N: int, n: int) -> np.ndarray:
    """``Wg(N, p)`` for every ``p`` of ``S_n`` in lexicographic order (object array)."""
    table = wg_table(N, n)
    _, cls, _ = _class_data(n)
    types = list(table.values)
    return np.array([table.values[types[c]] for c in cls], dtype=object)


# --- exact moments -----------------------------------------------------------

@lru_cache(maxsize=None)
def _perm_tables(form: str, n: int):
    gamma = reference(form, n)
    arr = pc.all_permutations_array(gamma.n)
    g_arr = np.asarray(gamma.mapping, dtype=arr.dtype)
    cyc = pc.cycle_counts_array(arr)
    cyc_gamma = pc.cycle_counts_array(pc.compose_array(pc.inverse_array(g_arr), arr))
    inv = pc.inverse_array(arr)
    # #(b a^-1) for every (a, b); conjugate to a^-1 b so the distance table works
    cyc_quot = pc.cycle_counts_array(pc.compose_array(inv[:, None, :], arr[None, :, :]))
    # class index of a^-1 b, used to look up Wg
    m = gamma.n
    weights = (m ** np.arange(m - 1, -1, -1)).astype(np.int64)
    codes = arr.astype(np.int64) @ weights
    prod = pc.compose_array(inv[:, None, :], arr[None, :, :]).astype(np.int64) @ weights
    quot_index = np.searchsorted(codes, prod)  # codes are sorted (lexicographic)
    return cyc, cyc_gamma, cyc_quot, quot_index


def _npow(N: int, e) -> Fraction:
    e = int(e)
    return Fraction(N) ** e


def _moment(g: FattenedGraph, n: int, N: int, form: str, cap: int) -> Fraction:
    gamma = reference(form, n)
    m = gamma.n
    size = len(pc.all_permutations(m))
    work = g.k * size * size
    if work > cap:
        raise WeingartenError(f"per-vertex work {work} exceeds cap {cap}")
    for d in g.degrees:
        if N ** d < m:
            raise WeingartenError(f"N^d={N ** d} < {m}: Weingarten function undefined")
    cyc, cyc_gamma, cyc_quot, quot_index = _perm_tables(form, n)
    X = area(g)
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    if g.k > len(letters):
        raise WeingartenError("too many vertices for the contraction")
    ops, subs = [], []
    for i, (s, t, d) in enumerate(zip(g.s, g.t, g.degrees)):
        wgv = wg_vector(N ** d, m)
        # h_i(b) = sum_a N^{#(gamma^-1 a) s + #(a) t} Wg(N^d, b a^-1)
        weight_a = np.array([_npow(N, cyc_gamma[a] * s + cyc[a] * t) for a in range(size)], dtype=object)
        wg_ab = wgv[quot_index]  # [a, b] -> Wg(a^-1 b) = Wg(b a^-1)
        h = (weight_a[:, None] * wg_ab).sum(axis=0)
        ops.append(h)
        subs.append(letters[i])
    dist_pow = {}
    for (i, j), e in g.multiplicities.items():
        if e not in dist_pow:
            # N^{(#(b_i b_j^-1) - m) e}; #(b_i b_j^-1) = #(b_i^-1 b_j)
            dist_pow[e] = np.vectorize(lambda c, e=e: _npow(N, (c - m) * e), otypes=[object])(cyc_quot)
        ops.append(dist_pow[e])
        subs.append(letters[i] + letters[j])
    expr = ",".join(subs) + "->"
    total = np.einsum(expr, *ops, optimize=True)
    if isinstance(total, np.ndarray):
        total = total.item()
    return _npow(N, X * pc.length(gamma)) * Fraction(total)


def exact_first_moment(g: FattenedGraph, n: int, N: int, cap: int = MOMENT_WORK_CAP) -> Fraction:
    """``N^{X(n-1)} E Tr rho_S^n`` as an exact rational."""
    return _moment(g, n, N, "n", cap)


def exact_second_moment(g: FattenedGraph, n: int, N: int, cap: int = MOMENT_WORK_CAP) -> Fraction:
    """``E[(N^{X(n-1)} Tr rho_S^n)^2]`` via the ``S_{2n}`` sum with ``gamma_{n,n}``."""
    return _moment(g, n, N, "nn", cap)


def exact_variance(g: FattenedGraph, n: int, N: int, cap: int = MOMENT_WORK_CAP) -> Fraction:
    return exact_second_moment(g, n, N, cap) - exact_first_moment(g, n, N, cap) ** 2
