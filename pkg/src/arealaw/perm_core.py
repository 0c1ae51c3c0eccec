"""Symmetric-group arithmetic in 0-based one-line notation.

A permutation ``p`` of degree ``n`` is stored as the tuple ``(p(0), ..., p(n-1))``.
Products follow function composition: ``compose(p, q)(i) == p(q(i))``.

Besides the scalar :class:`Permutation` type, the module carries a few
vectorised helpers (``*_array``) that operate on stacks of permutations held in
integer numpy arrays; the tuple scans in :mod:`arealaw.moment_engine` are built
on them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations as _itertools_permutations
from typing import Iterable, Sequence

import numpy as np

ENUMERATION_CAP = 8
INTERVAL_CAP = 7


class PermutationError(ValueError):
    """Invalid permutation input or violated precondition."""


@dataclass(frozen=True)
class Permutation:
    mapping: tuple[int, ...]

    def __post_init__(self):
        mapping = tuple(int(x) for x in self.mapping)
        n = len(mapping)
        if n == 0:
            raise PermutationError("degree must be positive")
        if sorted(mapping) != list(range(n)):
            raise PermutationError(f"not a bijection on range({n}): {mapping}")
        object.__setattr__(self, "mapping", mapping)

    @property
    def n(self) -> int:
        return len(self.mapping)

    def __call__(self, i: int) -> int:
        return self.mapping[i]

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def __repr__(self) -> str:
        return f"Permutation({list(self.mapping)})"

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, j in enumerate(self.mapping):
            inv[j] = i
        return Permutation(tuple(inv))

    def cycles(self) -> list[tuple[int, ...]]:
        """Cycles in canonical form: each starts at its minimum, sorted by start."""
        seen = [False] * self.n
        out = []
        for start in range(self.n):
            if seen[start]:
                continue
            cyc = []
            i = start
            while not seen[i]:
                seen[i] = True
                cyc.append(i)
                i = self.mapping[i]
            out.append(tuple(cyc))
        return out

    def cycle_count(self) -> int:
        return len(self.cycles())

    def cycle_type(self) -> tuple[int, ...]:
        return tuple(sorted((len(c) for c in self.cycles()), reverse=True))

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.mapping))

    def cycle_string(self) -> str:
        cyc = [c for c in self.cycles() if len(c) > 1]
        if not cyc:
            return "()"
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cyc)


def _check_same_degree(p: Permutation, q: Permutation) -> None:
    if p.n != q.n:
        raise PermutationError(f"degree mismatch: {p.n} != {q.n}")


def identity(n: int) -> Permutation:
    return Permutation(tuple(range(n)))


def transposition(n: int, i: int, j: int) -> Permutation:
    if i == j:
        raise PermutationError("transposition needs two distinct points")
    m = list(range(n))
    m[i], m[j] = m[j], m[i]
    return Permutation(tuple(m))


def from_cycles(n: int, cycles: Iterable[Sequence[int]]) -> Permutation:
    """Build a permutation of degree ``n`` from disjoint cycles (0-based)."""
    m = list(range(n))
    used: set[int] = set()
    for cyc in cycles:
        for a in cyc:
            if a in used:
                raise PermutationError(f"point {a} appears in two cycles")
            used.add(a)
        for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
            m[a] = b
    return Permutation(tuple(m))


def compose(p: Permutation, q: Permutation) -> Permutation:
    """Return ``r`` with ``r(i) = p(q(i))``."""
    _check_same_degree(p, q)
    return Permutation(tuple(p.mapping[j] for j in q.mapping))


def length(p: Permutation) -> int:
    """Minimal number of transpositions whose product is ``p``: ``n - #cycles``."""
    return p.n - p.cycle_count()


def distance(p: Permutation, q: Permutation) -> int:
    """``|p^{-1} q|``, the Cayley-graph distance between ``p`` and ``q``."""
    return length(compose(p.inverse(), q))


def full_cycle(n: int) -> Permutation:
    """The cycle ``(0 1 ... n-1)``."""
    if n < 1:
        raise PermutationError("full_cycle needs n >= 1")
    return Permutation(tuple((i + 1) % n for i in range(n)))


def double_cycle(n: int) -> Permutation:
    """``(0 ... n-1)(n ... 2n-1)`` on ``2n`` points."""
    if n < 1:
        raise PermutationError("double_cycle needs n >= 1")
    first = [(i + 1) % n for i in range(n)]
    return Permutation(tuple(first + [n + x for x in first]))


def geodesic_le(a: Permutation, b: Permutation) -> bool:
    """True iff ``a`` lies on a geodesic from the identity to ``b``."""
    _check_same_degree(a, b)
    return length(a) + distance(a, b) == length(b)


def is_noncrossing(p: Permutation) -> bool:
    return geodesic_le(p, full_cycle(p.n))


def catalan(n: int) -> int:
    return math.comb(2 * n, n) // (n + 1)


@lru_cache(maxsize=None)
def _all_permutations(n: int) -> tuple[Permutation, ...]:
    return tuple(Permutation(m) for m in _itertools_permutations(range(n)))


def all_permutations(n: int) -> tuple[Permutation, ...]:
    """All of ``S_n`` in lexicographic order of one-line notation."""
    if n < 1:
        raise PermutationError("degree must be positive")
    return _all_permutations(n)


def enumerate_noncrossing(n: int, cap: int = ENUMERATION_CAP) -> list[Permutation]:
    """Non-crossing permutations of degree ``n``, lexicographically ordered.

    The scan is exhaustive over ``S_n``; ``cap`` bounds the factorial cost.
    """
    if n > cap:
        raise PermutationError(f"n={n} exceeds enumeration cap {cap}")
    arr = all_permutations_array(n)
    gamma = np.asarray(full_cycle(n).mapping)
    lengths = n - cycle_counts_array(arr)
    to_gamma = n - cycle_counts_array(compose_array(inverse_array(arr), gamma[None, :]))
    keep = np.flatnonzero(lengths + to_gamma == n - 1)
    return [Permutation(tuple(arr[i])) for i in keep]


def is_connected(p: Permutation) -> bool:
    """True iff some cycle of ``p`` meets both halves ``[0, n)`` and ``[n, 2n)``."""
    if p.n % 2:
        raise PermutationError("connectedness needs an even degree")
    half = p.n // 2
    return any(min(c) < half <= max(c) for c in p.cycles())


def split_halves(p: Permutation) -> tuple[Permutation, Permutation]:
    """Restrictions of a non-connected ``p`` to its two halves, reindexed from 0."""
    if is_connected(p):
        raise PermutationError("cannot split a connected permutation")
    half = p.n // 2
    lo = Permutation(p.mapping[:half])
    hi = Permutation(tuple(x - half for x in p.mapping[half:]))
    return lo, hi


def join_halves(lo: Permutation, hi: Permutation) -> Permutation:
    """Inverse of :func:`split_halves`."""
    _check_same_degree(lo, hi)
    return Permutation(lo.mapping + tuple(x + lo.n for x in hi.mapping))


def interval_count(a: Permutation, b: Permutation, cap: int = INTERVAL_CAP) -> int:
    """Number of ``c`` with ``a <= c <= b`` in the geodesic order (exhaustive over S_n)."""
    if not geodesic_le(a, b):
        raise PermutationError("interval_count requires a <= b")
    if a.n > cap:
        raise PermutationError(f"n={a.n} exceeds interval cap {cap}")
    return sum(1 for c in all_permutations(a.n) if geodesic_le(a, c) and geodesic_le(c, b))


def moebius_phi(p: Permutation) -> int:
    """Leading large-N Weingarten coefficient: product over cycles of (-1)^(l-1) Cat(l-1)."""
    out = 1
    for c in p.cycles():
        ell = len(c)
        out *= (-1) ** (ell - 1) * catalan(ell - 1)
    return out


# --- vectorised helpers ----------------------------------------------------

@lru_cache(maxsize=None)
def _all_permutations_array(n: int) -> np.ndarray:
    arr = np.array(list(_itertools_permutations(range(n))), dtype=np.int8)
    arr.setflags(write=False)
    return arr


def all_permutations_array(n: int) -> np.ndarray:
    """``(n!, n)`` array of S_n in lexicographic order (same order as :func:`all_permutations`)."""
    return _all_permutations_array(n)


def as_array(perms: Sequence[Permutation]) -> np.ndarray:
    return np.array([p.mapping for p in perms], dtype=np.int8)


def compose_array(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Row-wise (broadcast) composition ``r[..., i] = p[..., q[..., i]]``."""
    p, q = np.broadcast_arrays(p, q)
    return np.take_along_axis(p, q.astype(np.intp), axis=-1)


def inverse_array(p: np.ndarray) -> np.ndarray:
    inv = np.empty_like(p)
    idx = np.broadcast_to(np.arange(p.shape[-1], dtype=p.dtype), p.shape)
    np.put_along_axis(inv, p.astype(np.intp), idx, axis=-1)
    return inv


def cycle_counts_array(p: np.ndarray) -> np.ndarray:
    """Number of cycles of every permutation in a stack ``(..., n)``."""
    n = p.shape[-1]
    ids = np.broadcast_to(np.arange(n, dtype=p.dtype), p.shape)
    orbit_min = ids.copy()
    cur = ids.astype(np.intp)
    pp = p.astype(np.intp)
    for _ in range(n - 1):
        cur = np.take_along_axis(pp, cur, axis=-1)
        np.minimum(orbit_min, cur, out=orbit_min, casting="unsafe")
    return (orbit_min == ids).sum(axis=-1)


def lengths_array(p: np.ndarray) -> np.ndarray:
    return p.shape[-1] - cycle_counts_array(p)


def distance_table(rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """``D[a, b] = |rows[a]^{-1} cols[b]|`` for two stacks of permutations."""
    inv = inverse_array(rows)
    prod = compose_array(inv[:, None, :], cols[None, :, :])
    return lengths_array(prod)


def connected_mask_array(p: np.ndarray) -> np.ndarray:
    """Boolean mask of connected permutations in a stack of even degree."""
    two_n = p.shape[-1]
    if two_n % 2:
        raise PermutationError("connectedness needs an even degree")
    half = two_n // 2
    # p is non-connected iff it maps each half into itself
    return ((p[..., :half] >= half).any(axis=-1)) | ((p[..., half:] < half).any(axis=-1))
