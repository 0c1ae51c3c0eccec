"""Capacitated network gamma -> beta_1..beta_k -> Id and its maximum flow.

Node ids: ``0`` is the source (gamma), ``1..k`` are the vertex nodes beta_i,
``k + 1`` is the sink (Id). Flows are stored as skew-symmetric integer matrices
(``flow[u, v] == -flow[v, u]``), so the two opposing beta-beta arcs never carry
flow simultaneously.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .graph_model import FattenedGraph

MAX_FLOW_ENUMERATION = 64
MIN_CUT_CAP = 20


class FlowNetworkError(ValueError):
    pass


@dataclass(frozen=True)
class FlowNetwork:
    k: int
    capacity: np.ndarray  # (k+2, k+2) int64
    labels: tuple[str, ...]

    @property
    def source(self) -> int:
        return 0

    @property
    def sink(self) -> int:
        return self.k + 1

    @property
    def size(self) -> int:
        return self.k + 2

    def beta(self, i: int) -> int:
        """Node id of beta_i for 0-based vertex ``i``."""
        return i + 1

    def arcs(self) -> list[tuple[int, int, int]]:
        n = self.size
        return [(u, v, int(self.capacity[u, v])) for u in range(n) for v in range(n)
                if self.capacity[u, v] > 0]


@dataclass(frozen=True)
class FlowResult:
    value: int
    flow: np.ndarray
    paths: tuple[tuple[tuple[int, ...], int], ...]
    augmentations: tuple[tuple[tuple[int, ...], int], ...]
    network: FlowNetwork

    @property
    def residual(self) -> np.ndarray:
        """``c_f(u, v) = c(u, v) - f(u, v)`` with the skew-symmetric flow."""
        return self.network.capacity - self.flow

    def slack(self, u: int, v: int) -> int:
        """Unused capacity of the (undirected for beta-beta) edge ``{u, v}``.

        Source and sink arcs are directed, so this is just ``c - f`` there; for
        a beta-beta pair it is ``e_ij - |f_ij|``.
        """
        return int(self.network.capacity[u, v] - abs(self.flow[u, v]))


def build_network(g: FattenedGraph, strict: bool = True) -> FlowNetwork:
    k = g.k
    cap = np.zeros((k + 2, k + 2), dtype=np.int64)
    for i in range(k):
        cap[0, i + 1] = g.s[i]
        cap[i + 1, k + 1] = g.t[i]
    for (i, j), e in g.multiplicities.items():
        cap[i + 1, j + 1] = e
        cap[j + 1, i + 1] = e
    net = FlowNetwork(k=k, capacity=cap, labels=("gamma",) + tuple(f"beta_{v}" for v in g.vertices) + ("Id",))
    if strict:
        fwd = _reachable(cap, 0)
        bwd = _reachable(cap.T, k + 1)
        bad = [g.vertices[i] for i in range(k) if not (fwd[i + 1] and bwd[i + 1])]
        if bad:
            raise FlowNetworkError(f"vertices not on any source-sink path: {bad}")
    return net


def _reachable(cap: np.ndarray, start: int) -> np.ndarray:
    seen = np.zeros(cap.shape[0], dtype=bool)
    seen[start] = True
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in np.flatnonzero(cap[u] > 0):
            if not seen[v]:
                seen[v] = True
                queue.append(int(v))
    return seen


def _bfs_path(residual: np.ndarray, s: int, t: int):
    """Shortest s-t path in the residual graph, neighbours scanned in index order."""
    parent = [-1] * residual.shape[0]
    parent[s] = s
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for v in range(residual.shape[0]):
            if parent[v] < 0 and residual[u, v] > 0:
                parent[v] = u
                if v == t:
                    path = [t]
                    while path[-1] != s:
                        path.append(parent[path[-1]])
                    return path[::-1]
                queue.append(v)
    return None


def _cancel_cycles(flow: np.ndarray) -> np.ndarray:
    """Remove directed cycles from the positive part of a skew-symmetric flow."""
    flow = flow.copy()
    n = flow.shape[0]
    while True:
        cycle = _find_cycle(flow > 0, n)
        if cycle is None:
            return flow
        amt = min(flow[a, b] for a, b in zip(cycle, cycle[1:]))
        for a, b in zip(cycle, cycle[1:]):
            flow[a, b] -= amt
            flow[b, a] += amt


def _find_cycle(adj: np.ndarray, n: int):
    color = [0] * n
    stack_path: list[int] = []

    def dfs(u):
        color[u] = 1
        stack_path.append(u)
        for v in range(n):
            if adj[u, v]:
                if color[v] == 1:
                    i = stack_path.index(v)
                    return stack_path[i:] + [v]
                if color[v] == 0:
                    found = dfs(v)
                    if found is not None:
                        return found
        color[u] = 2
        stack_path.pop()
        return None

    for u in range(n):
        if color[u] == 0:
            found = dfs(u)
            if found is not None:
                return found
    return None


def decompose(flow: np.ndarray, s: int, t: int) -> tuple[tuple[tuple[int, ...], int], ...]:
    """Path decomposition of an acyclic flow; BFS along positive arcs, index order."""
    rest = np.where(flow > 0, flow, 0)
    out = []
    while True:
        path = _bfs_path(rest, s, t)
        if path is None:
            break
        amt = int(min(rest[a, b] for a, b in zip(path, path[1:])))
        for a, b in zip(path, path[1:]):
            rest[a, b] -= amt
        out.append((tuple(path), amt))
    return tuple(out)


def max_flow(net: FlowNetwork) -> FlowResult:
    """Edmonds-Karp on the network; returns a cycle-free flow and its decomposition."""
    cap = net.capacity
    flow = np.zeros_like(cap)
    s, t = net.source, net.sink
    augs = []
    while True:
        path = _bfs_path(cap - flow, s, t)
        if path is None:
            break
        amt = int(min(cap[a, b] - flow[a, b] for a, b in zip(path, path[1:])))
        for a, b in zip(path, path[1:]):
            flow[a, b] += amt
            flow[b, a] -= amt
        augs.append((tuple(path), amt))
    flow = _cancel_cycles(flow)
    value = int(flow[s].sum())
    return FlowResult(value=value, flow=flow, paths=decompose(flow, s, t),
                      augmentations=tuple(augs), network=net)


def flow_value(g: FattenedGraph) -> int:
    return max_flow(build_network(g, strict=False)).value


def min_cut_value(net: FlowNetwork, cap_k: int = MIN_CUT_CAP) -> int:
    """Minimum source/sink cut by enumerating every subset of beta nodes."""
    if net.k > cap_k:
        raise FlowNetworkError(f"k={net.k} exceeds min-cut enumeration cap {cap_k}")
    c = net.capacity
    betas = list(range(1, net.k + 1))
    best = None
    for r in range(net.k + 1):
        for side in combinations(betas, r):
            src = np.zeros(net.size, dtype=bool)
            src[0] = True
            src[list(side)] = True
            val = int(c[np.ix_(src, ~src)].sum())
            if best is None or val < best:
                best = val
    return best


def check_conservation(net: FlowNetwork, flow: np.ndarray) -> bool:
    skew = np.array_equal(flow, -flow.T)
    within = bool(np.all(flow <= net.capacity))
    inner = all(flow[v].sum() == 0 for v in range(1, net.k + 1))
    return skew and within and inner


def enumerate_max_flows(net: FlowNetwork, limit: int = MAX_FLOW_ENUMERATION):
    """Distinct acyclic maximum flows, at most ``limit`` of them.

    Returns ``(flows, complete)``; ``complete`` is False when the search was cut
    off at ``limit``. Backtracks over edges assigning integer (net) flows and
    prunes a node as soon as all its edges are fixed and it is unbalanced.
    """
    target = max_flow(net).value
    cap = net.capacity
    k = net.k
    edges = []  # (u, v, lo, hi): net flow from u to v in [lo, hi]
    for i in range(1, k + 1):
        if cap[0, i] > 0:
            edges.append((0, i, 0, int(cap[0, i])))
    for i in range(1, k + 1):
        for j in range(i + 1, k + 1):
            if cap[i, j] > 0:
                edges.append((i, j, -int(cap[i, j]), int(cap[i, j])))
    for i in range(1, k + 1):
        if cap[i, k + 1] > 0:
            edges.append((i, k + 1, 0, int(cap[i, k + 1])))
    last_touch = {}
    for idx, (u, v, _, _) in enumerate(edges):
        last_touch[u] = idx
        last_touch[v] = idx
    closes = [[] for _ in edges]
    for node, idx in last_touch.items():
        if 1 <= node <= k:
            closes[idx].append(node)

    flows: list[np.ndarray] = []
    seen: set[bytes] = set()
    balance = np.zeros(k + 2, dtype=np.int64)
    cur = np.zeros_like(cap)

    def rec(idx):
        if len(flows) >= limit:
            return
        if idx == len(edges):
            if balance[k + 1] != target:
                return
            f = _cancel_cycles(cur)
            key = f.tobytes()
            if key not in seen:
                seen.add(key)
                flows.append(f)
            return
        u, v, lo, hi = edges[idx]
        for x in range(lo, hi + 1):
            cur[u, v], cur[v, u] = x, -x
            balance[u] -= x
            balance[v] += x
            if all(balance[node] == 0 for node in closes[idx]):
                rec(idx + 1)
            balance[u] += x
            balance[v] -= x
            if len(flows) >= limit:
                break
        cur[u, v] = cur[v, u] = 0

    rec(0)
    complete = len(flows) < limit
    return flows, complete


def flow_result_from(net: FlowNetwork, flow: np.ndarray) -> FlowResult:
    flow = _cancel_cycles(flow)
    return FlowResult(value=int(flow[0].sum()), flow=flow,
                      paths=decompose(flow, net.source, net.sink),
                      augmentations=(), network=net)


def path_labels(net: FlowNetwork, path) -> list[str]:
    return [net.labels[u] for u in path]
