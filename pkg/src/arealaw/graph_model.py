"""Base graphs, their fattened half-edge structure, and the crossing oracle."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from itertools import combinations, product
from pathlib import Path
from typing import Mapping, Sequence

BRUTE_FORCE_CAP = 10**7


class GraphSpecError(ValueError):
    pass


@dataclass(frozen=True)
class FattenedGraph:
    """Vertices ``0..k-1`` with merged edge multiplicities and an S/T split.

    ``multiplicities`` maps ``(i, j)`` with ``i < j`` to ``e_ij > 0``.
    Half-edges are laid out vertex-major: vertex ``i`` owns the contiguous
    block ``offsets[i] : offsets[i] + degrees[i]``, ordered by the sorted
    edge list.
    """

    name: str
    vertices: tuple[str, ...]
    multiplicities: Mapping[tuple[int, int], int]
    s: tuple[int, ...]
    degrees: tuple[int, ...] = field(init=False)
    t: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        k = len(self.vertices)
        if k == 0:
            raise GraphSpecError("graph has no vertices")
        if len(set(self.vertices)) != k:
            raise GraphSpecError("duplicate vertex labels")
        mult = {}
        for (i, j), e in sorted(dict(self.multiplicities).items()):
            i, j, e = int(i), int(j), int(e)
            if i == j:
                raise GraphSpecError(f"loop at vertex {self.vertices[i]!r} is not supported")
            if not (0 <= i < k and 0 <= j < k):
                raise GraphSpecError(f"edge ({i}, {j}) out of range")
            if e < 0:
                raise GraphSpecError("negative multiplicity")
            if e == 0:
                continue
            key = (min(i, j), max(i, j))
            mult[key] = mult.get(key, 0) + e
        object.__setattr__(self, "multiplicities", dict(sorted(mult.items())))
        deg = [0] * k
        for (i, j), e in mult.items():
            deg[i] += e
            deg[j] += e
        if len(self.s) != k:
            raise GraphSpecError(f"expected {k} split counts, got {len(self.s)}")
        s = tuple(int(x) for x in self.s)
        for v, (d, si) in enumerate(zip(deg, s)):
            if si < 0:
                raise GraphSpecError(f"negative s at vertex {self.vertices[v]!r}")
            if si > d:
                raise GraphSpecError(f"s={si} exceeds degree {d} at vertex {self.vertices[v]!r}")
            if d == 0:
                raise GraphSpecError(f"isolated vertex {self.vertices[v]!r} (s_i + t_i = 0)")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "degrees", tuple(deg))
        object.__setattr__(self, "t", tuple(d - si for d, si in zip(deg, s)))

    @property
    def k(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return sum(self.multiplicities.values())

    def e(self, i: int, j: int) -> int:
        if i > j:
            i, j = j, i
        return self.multiplicities.get((i, j), 0)

    @property
    def offsets(self) -> tuple[int, ...]:
        out, acc = [], 0
        for d in self.degrees:
            out.append(acc)
            acc += d
        return tuple(out)

    def edge_list(self) -> list[tuple[int, int]]:
        """Edges with repetition, sorted."""
        return [ij for ij, e in self.multiplicities.items() for _ in range(e)]

    def half_edge_pairs(self) -> list[tuple[int, int]]:
        """Pairs of global half-edge indices joined by an edge."""
        nxt = list(self.offsets)
        pairs = []
        for i, j in self.edge_list():
            pairs.append((nxt[i], nxt[j]))
            nxt[i] += 1
            nxt[j] += 1
        return pairs

    def default_keep(self) -> list[int]:
        """First ``s_i`` half-edges of every vertex."""
        return [o + r for o, si in zip(self.offsets, self.s) for r in range(si)]

    def relabel(self, order: Sequence[int]) -> "FattenedGraph":
        """Graph with vertex ``order[v]`` moved to position ``v``."""
        pos = {old: new for new, old in enumerate(order)}
        mult = {(pos[i], pos[j]): e for (i, j), e in self.multiplicities.items()}
        return FattenedGraph(
            name=self.name,
            vertices=tuple(self.vertices[o] for o in order),
            multiplicities={(min(a, b), max(a, b)): e for (a, b), e in mult.items()},
            s=tuple(self.s[o] for o in order),
        )

    def to_spec(self) -> dict:
        return {
            "name": self.name,
            "vertices": list(self.vertices),
            "edges": [[self.vertices[i], self.vertices[j]] for i, j in self.edge_list()],
            "s": {v: si for v, si in zip(self.vertices, self.s)},
        }


def from_edges(name: str, k: int, edges: Sequence[tuple[int, int]], s: Sequence[int]) -> FattenedGraph:
    """Convenience constructor on integer vertices ``0..k-1``."""
    mult: dict[tuple[int, int], int] = {}
    for i, j in edges:
        if i == j:
            raise GraphSpecError(f"loop at vertex {i} is not supported")
        key = (min(i, j), max(i, j))
        mult[key] = mult.get(key, 0) + 1
    return FattenedGraph(name=name, vertices=tuple(str(v + 1) for v in range(k)),
                         multiplicities=mult, s=tuple(s))


def parse_graph(doc: Mapping) -> FattenedGraph:
    try:
        name = str(doc["name"])
        vertices = [str(v) for v in doc["vertices"]]
        edges = doc["edges"]
        s_doc = doc["s"]
    except (KeyError, TypeError) as exc:
        raise GraphSpecError(f"missing field: {exc}") from exc
    index = {v: i for i, v in enumerate(vertices)}
    mult: dict[tuple[int, int], int] = {}
    for edge in edges:
        if len(edge) != 2:
            raise GraphSpecError(f"edge must have two endpoints: {edge!r}")
        a, b = (str(x) for x in edge)
        if a not in index or b not in index:
            raise GraphSpecError(f"edge {edge!r} references an unknown vertex")
        if a == b:
            raise GraphSpecError(f"loop at vertex {a!r} is not supported")
        i, j = sorted((index[a], index[b]))
        mult[(i, j)] = mult.get((i, j), 0) + 1
    if isinstance(s_doc, Mapping):
        unknown = set(map(str, s_doc)) - set(index)
        if unknown:
            raise GraphSpecError(f"s references unknown vertices {sorted(unknown)}")
        s = [s_doc.get(v, 0) for v in vertices]
    else:
        s = list(s_doc)
    if not all(isinstance(x, int) and not isinstance(x, bool) for x in s):
        raise GraphSpecError("s values must be integers")
    return FattenedGraph(name=name, vertices=tuple(vertices), multiplicities=mult, s=tuple(s))


BUNDLED = ("chain", "lattice", "single-edge", "double-edge")


def bundled_path(name: str):
    stem = name[:-5] if name.endswith(".json") else name
    if stem not in BUNDLED:
        raise GraphSpecError(f"{name!r} is neither a readable file nor a bundled graph {list(BUNDLED)}")
    return resources.files("arealaw") / "specs" / f"{stem}.json"


def load_graph(spec) -> FattenedGraph:
    """Load from a mapping, a JSON string, a file path, or a bundled name."""
    if isinstance(spec, Mapping):
        return parse_graph(spec)
    text = None
    if isinstance(spec, (str, Path)):
        p = Path(spec)
        if p.is_file():
            text = p.read_text(encoding="utf-8")
        elif isinstance(spec, str) and spec.lstrip().startswith("{"):
            text = spec
        else:
            text = bundled_path(str(spec)).read_text(encoding="utf-8")
    if text is None:
        raise GraphSpecError(f"cannot load graph from {type(spec).__name__}")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphSpecError(f"invalid JSON: {exc}") from exc
    return parse_graph(doc)


def assignment_count(g: FattenedGraph) -> int:
    return math.prod(math.comb(d, s) for d, s in zip(g.degrees, g.s))


def max_crossing_assignment(g: FattenedGraph, cap: int = BRUTE_FORCE_CAP) -> tuple[int, list[int]]:
    """Exhaustive maximum of crossing edges and a lexicographically first maximiser.

    The maximiser is returned as the sorted list of half-edges placed in S.
    """
    total = assignment_count(g)
    if total > cap:
        raise GraphSpecError(f"{total} assignments exceed brute-force cap {cap}")
    pairs = g.half_edge_pairs()
    n_half = 2 * g.m
    choices = [list(combinations(range(o, o + d), si))
               for o, d, si in zip(g.offsets, g.degrees, g.s)]
    best, arg = -1, []
    for pick in product(*choices):
        in_s = [False] * n_half
        for block in pick:
            for h in block:
                in_s[h] = True
        c = sum(1 for a, b in pairs if in_s[a] != in_s[b])
        if c > best:
            best, arg = c, [h for block in pick for h in block]
    return best, arg


def brute_force_area(g: FattenedGraph, cap: int = BRUTE_FORCE_CAP) -> int:
    return max_crossing_assignment(g, cap)[0]
