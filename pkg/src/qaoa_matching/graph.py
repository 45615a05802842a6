"""Undirected simple graphs over edge-indexed qubits.

Edge ``i`` of a :class:`Graph` is the qubit ``i`` of every statevector built on
it; indices are fixed at construction and never reshuffled.  Sweep orderings
live in a separate :class:`EdgeOrdering` layer.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class GraphError(ValueError):
    """Invalid graph construction or generator parameters."""


class SelfLoop(GraphError):
    pass


class DuplicateEdge(GraphError):
    pass


class VertexOutOfRange(GraphError):
    pass


class NotAPermutation(GraphError):
    pass


class OrderingUndefined(GraphError):
    """A fixed ordering was requested on a component that is neither a cycle nor a path."""


@dataclass(frozen=True)
class Graph:
    num_vertices: int
    edges: tuple[tuple[int, int], ...]
    name: str = field(default="", compare=False)

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self) -> list[int]:
        deg = [0] * self.num_vertices
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def is_two_regular(self) -> bool:
        return self.m > 0 and all(d == 2 for d in self.degree())

    def describe(self) -> str:
        return self.name or f"G(n={self.num_vertices}, m={self.m})"

    def to_json(self) -> str:
        return json.dumps(
            {"num_vertices": self.num_vertices, "edges": [list(e) for e in self.edges]}
        )

    @classmethod
    def from_json(cls, text: str) -> "Graph":
        data = json.loads(text)
        return build_graph(data["num_vertices"], data["edges"])


def build_graph(num_vertices: int, edges: Iterable[Sequence[int]], name: str = "") -> Graph:
    if num_vertices < 0:
        raise GraphError(f"negative vertex count {num_vertices}")
    seen: set[frozenset[int]] = set()
    normalized = []
    for pair in edges:
        u, v = (int(x) for x in pair)
        if u == v:
            raise SelfLoop(f"self-loop at vertex {u}")
        if not (0 <= u < num_vertices and 0 <= v < num_vertices):
            raise VertexOutOfRange(f"edge ({u}, {v}) outside 0..{num_vertices - 1}")
        key = frozenset((u, v))
        if key in seen:
            raise DuplicateEdge(f"edge ({u}, {v}) given twice")
        seen.add(key)
        normalized.append((u, v))
    return Graph(num_vertices, tuple(normalized), name)


def cycle(n: int) -> Graph:
    if n < 3:
        raise GraphError(f"cycle needs n >= 3, got {n}")
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)], name=f"C{n}")


def path(n_vertices: int) -> Graph:
    if n_vertices < 2:
        raise GraphError(f"path needs >= 2 vertices, got {n_vertices}")
    return build_graph(
        n_vertices, [(i, i + 1) for i in range(n_vertices - 1)], name=f"P{n_vertices}"
    )


def two_regular(cycle_sizes: Sequence[int]) -> Graph:
    if not cycle_sizes:
        raise GraphError("two_regular needs at least one cycle")
    edges = []
    offset = 0
    for n in cycle_sizes:
        if n < 3:
            raise GraphError(f"cycle component needs n >= 3, got {n}")
        edges.extend((offset + i, offset + (i + 1) % n) for i in range(n))
        offset += n
    name = "+".join(f"C{n}" for n in cycle_sizes)
    return build_graph(offset, edges, name=name)


def generate(family: str) -> Graph:
    """Build a graph from a descriptor like ``cycle:8``, ``path:5`` or ``two_regular:3,4``."""
    kind, _, arg = family.partition(":")
    kind = kind.strip().lower()
    try:
        if kind in ("cycle", "c"):
            return cycle(int(arg))
        if kind in ("path", "p"):
            return path(int(arg))
        if kind in ("two_regular", "2reg", "two-regular"):
            return two_regular([int(x) for x in arg.split(",") if x.strip()])
    except ValueError as exc:
        if isinstance(exc, GraphError):
            raise
        raise GraphError(f"bad generator argument in {family!r}") from exc
    raise GraphError(f"unknown graph family {family!r}")


def random_graph(rng: np.random.Generator, max_vertices: int = 10, max_edges: int = 10) -> Graph:
    """Uniform edge subset of K_n with 1 <= m <= max_edges, n drawn from 2..max_vertices."""
    n = int(rng.integers(2, max_vertices + 1))
    all_pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    m = int(rng.integers(1, min(max_edges, len(all_pairs)) + 1))
    picked = sorted(rng.choice(len(all_pairs), size=m, replace=False).tolist())
    return build_graph(n, [all_pairs[i] for i in picked], name=f"rand(n={n},m={m})")


def edge_adjacency(g: Graph) -> tuple[frozenset[int], ...]:
    """Per edge, the indices of the other edges sharing an endpoint with it."""
    incident: list[list[int]] = [[] for _ in range(g.num_vertices)]
    for i, (u, v) in enumerate(g.edges):
        incident[u].append(i)
        incident[v].append(i)
    nbhd = []
    for i, (u, v) in enumerate(g.edges):
        nbhd.append(frozenset(incident[u] + incident[v]) - {i})
    return tuple(nbhd)


def neighbor_masks(g: Graph) -> list[int]:
    """Bitmask form of :func:`edge_adjacency`."""
    return [sum(1 << j for j in nb) for nb in edge_adjacency(g)]


def _edge_components(g: Graph) -> list[list[int]]:
    parent = list(range(g.num_vertices))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in g.edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
    groups: dict[int, list[int]] = {}
    for i, (u, _) in enumerate(g.edges):
        groups.setdefault(find(u), []).append(i)
    return sorted(groups.values(), key=lambda idx: idx[0])


def components(g: Graph) -> list[tuple[Graph, list[int]]]:
    """Connected components that carry edges, ordered by lowest edge index.

    Each entry is the component as a standalone graph (vertices relabelled in
    ascending order) plus the map from its edge indices into ``g``.
    """
    out = []
    for idx in _edge_components(g):
        verts = sorted({x for i in idx for x in g.edges[i]})
        relabel = {v: k for k, v in enumerate(verts)}
        sub = build_graph(
            len(verts), [(relabel[g.edges[i][0]], relabel[g.edges[i][1]]) for i in idx]
        )
        out.append((sub, idx))
    return out


@dataclass(frozen=True)
class EdgeOrdering:
    order: tuple[int, ...]
    kind: str  # "fixed" or "arbitrary"

    def __iter__(self):
        return iter(self.order)

    def __len__(self) -> int:
        return len(self.order)


def _walk_component(g: Graph, idx: list[int], nbhd: tuple[frozenset[int], ...]) -> list[int]:
    members = set(idx)
    deg = g.degree()
    verts = {x for i in idx for x in g.edges[i]}
    if any(deg[v] > 2 for v in verts):
        raise OrderingUndefined("fixed ordering needs every component to be a cycle or a path")
    is_cycle = len(idx) == len(verts)
    if is_cycle:
        start = min(idx)
    else:
        # paths start at the end edge with the lower index
        ends = [i for i in idx if len(nbhd[i] & members) <= 1]
        start = min(ends)
    walk = [start]
    seen = {start}
    while len(walk) < len(idx):
        nxt = sorted((nbhd[walk[-1]] & members) - seen)
        if not nxt:
            raise OrderingUndefined("component walk stalled")
        walk.append(nxt[0])
        seen.add(nxt[0])
    return walk


def make_ordering(g: Graph, spec: str | Sequence[int] = "fixed") -> EdgeOrdering:
    if isinstance(spec, str):
        if spec != "fixed":
            raise GraphError(f"unknown ordering spec {spec!r}")
        nbhd = edge_adjacency(g)
        order: list[int] = []
        for idx in _edge_components(g):
            order.extend(_walk_component(g, idx, nbhd))
        return EdgeOrdering(tuple(order), "fixed")
    perm = [int(x) for x in spec]
    if sorted(perm) != list(range(g.m)):
        raise NotAPermutation(f"{perm} is not a permutation of 0..{g.m - 1}")
    return EdgeOrdering(tuple(perm), "arbitrary")


def random_ordering(g: Graph, rng: np.random.Generator) -> EdgeOrdering:
    return make_ordering(g, rng.permutation(g.m).tolist())
