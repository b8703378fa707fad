"""Finite simple graphs and the metric measurements shared by every stage.

Vertices are the dense integers ``0..n-1``.  Distances are hop counts; an
unreachable pair is at distance :data:`INF` (``math.inf``), never a large
integer.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

INF = math.inf

Edge = tuple[int, int]


class GraphError(ValueError):
    """Raised for malformed graphs or out-of-range vertices."""


def normalize_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph with sorted adjacency lists."""

    vertex_count: int
    adjacency: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.adjacency) != self.vertex_count:
            raise GraphError("adjacency length does not match vertex_count")
        for u, nbrs in enumerate(self.adjacency):
            prev = -1
            for v in nbrs:
                if not 0 <= v < self.vertex_count:
                    raise GraphError(f"neighbor {v} of {u} out of range")
                if v == u:
                    raise GraphError(f"loop at {u}")
                if v <= prev:
                    raise GraphError(f"adjacency of {u} not sorted or has duplicates")
                prev = v
        for u, nbrs in enumerate(self.adjacency):
            for v in nbrs:
                if u not in self._neighbor_sets[v]:
                    raise GraphError(f"edge ({u}, {v}) is not symmetric")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]], *, allow_duplicates: bool = False) -> "Graph":
        """Build a graph from an undirected edge list.

        Loops and out-of-range endpoints are rejected.  Duplicate pairs are
        rejected unless ``allow_duplicates`` is set, in which case they are merged.
        """
        if n < 0:
            raise GraphError("negative vertex count")
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise GraphError(f"loop at {u}")
            if v in nbrs[u] and not allow_duplicates:
                raise GraphError(f"duplicate edge ({u}, {v})")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(n, tuple(tuple(sorted(s)) for s in nbrs))

    @cached_property
    def _neighbor_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(a) for a in self.adjacency)

    @cached_property
    def neighbor_masks(self) -> tuple[int, ...]:
        """Adjacency as bitmasks: bit ``v`` of entry ``u`` is set iff ``uv`` is an edge."""
        out = []
        for nbrs in self.adjacency:
            m = 0
            for v in nbrs:
                m |= 1 << v
            out.append(m)
        return tuple(out)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._neighbor_sets[u]

    def edges(self) -> list[Edge]:
        """Undirected edges as ``(u, v)`` with ``u < v``, in lexicographic order."""
        return [(u, v) for u, nbrs in enumerate(self.adjacency) for v in nbrs if u < v]

    @cached_property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    @cached_property
    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    def check_vertex(self, x: int) -> None:
        if not 0 <= x < self.vertex_count:
            raise GraphError(f"vertex {x} out of range for n={self.vertex_count}")

    @cached_property
    def component_ids(self) -> tuple[int, ...]:
        return tuple(components(self))

    @cached_property
    def component_members(self) -> tuple[frozenset[int], ...]:
        groups: dict[int, set[int]] = {}
        for v, c in enumerate(self.component_ids):
            groups.setdefault(c, set()).add(v)
        return tuple(frozenset(groups[c]) for c in range(len(groups)))

    @cached_property
    def component_masks(self) -> tuple[int, ...]:
        out = [0] * len(self.component_members)
        for v, c in enumerate(self.component_ids):
            out[c] |= 1 << v
        return tuple(out)

    def csr(self) -> csr_matrix:
        rows, cols = [], []
        for u, nbrs in enumerate(self.adjacency):
            rows.extend([u] * len(nbrs))
            cols.extend(nbrs)
        data = np.ones(len(rows), dtype=np.int8)
        return csr_matrix((data, (rows, cols)), shape=(self.vertex_count, self.vertex_count))


def components(g: Graph) -> list[int]:
    """Component id per vertex; ids are numbered by smallest member vertex."""
    comp = [-1] * g.vertex_count
    next_id = 0
    for s in range(g.vertex_count):
        if comp[s] != -1:
            continue
        comp[s] = next_id
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in g.adjacency[u]:
                if comp[v] == -1:
                    comp[v] = next_id
                    queue.append(v)
        next_id += 1
    return comp


def bfs_distances(g: Graph, sources: int | Iterable[int], limit: float = INF) -> dict[int, int]:
    """Distances from a source set, truncated at ``limit`` hops."""
    if isinstance(sources, int):
        sources = (sources,)
    dist: dict[int, int] = {}
    queue: deque[int] = deque()
    for s in sources:
        if s not in dist:
            dist[s] = 0
            queue.append(s)
    while queue:
        u = queue.popleft()
        du = dist[u]
        if du >= limit:
            continue
        for v in g.adjacency[u]:
            if v not in dist:
                dist[v] = du + 1
                queue.append(v)
    return dist


def distance(g: Graph, x: int, y: int) -> float:
    if x == y:
        return 0
    if g.component_ids[x] != g.component_ids[y]:
        return INF
    # bidirectional would be faster; plain BFS with early exit suffices here
    dist = {x: 0}
    queue = deque([x])
    while queue:
        u = queue.popleft()
        for v in g.adjacency[u]:
            if v not in dist:
                if v == y:
                    return dist[u] + 1
                dist[v] = dist[u] + 1
                queue.append(v)
    return INF


def distance_matrix(g: Graph, sources: Sequence[int] | None = None) -> np.ndarray:
    """Hop distances from ``sources`` (default: all vertices) as a float array with ``inf``."""
    if g.vertex_count == 0:
        return np.zeros((0, 0))
    idx = list(range(g.vertex_count)) if sources is None else list(sources)
    if not idx:
        return np.zeros((0, g.vertex_count))
    return shortest_path(g.csr(), method="D", directed=False, unweighted=True, indices=idx)


def ball(g: Graph, x: int, r: int) -> frozenset[int]:
    g.check_vertex(x)
    if r < 0:
        raise GraphError("negative radius")
    return frozenset(bfs_distances(g, x, r))


def ball_around(g: Graph, a: Iterable[int], r: int) -> frozenset[int]:
    """``B_G(r; A)``: vertices within ``r`` of the set ``a``."""
    return frozenset(bfs_distances(g, a, r))


def metric_diameter(g: Graph, a: Iterable[int]) -> float:
    """Diameter of ``a`` in the ambient metric of ``g`` (not the induced one)."""
    pts = sorted(set(a))
    if len(pts) <= 1:
        return 0
    comp = g.component_ids
    if any(comp[p] != comp[pts[0]] for p in pts):
        return INF
    if len(pts) <= 32:
        best = 0
        targets = set(pts)
        for i, p in enumerate(pts[:-1]):
            dist = _distances_to_targets(g, p, targets)
            best = max(best, max(dist[q] for q in pts[i + 1:]))
        return best
    dm = distance_matrix(g, pts)[:, pts]
    return int(dm.max())


def _distances_to_targets(g: Graph, src: int, targets: set[int]) -> dict[int, int]:
    dist = {src: 0}
    remaining = len(targets) - (src in targets)
    queue = deque([src])
    while queue and remaining:
        u = queue.popleft()
        for v in g.adjacency[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                if v in targets:
                    remaining -= 1
                queue.append(v)
    return dist


def eccentricity_within(g: Graph, x: int, a: Iterable[int]) -> float:
    """``max_{y in a} d_G(x, y)``."""
    targets = set(a)
    dist = _distances_to_targets(g, x, targets)
    return max((dist.get(y, INF) for y in targets), default=0)


def power_graph(g: Graph, k: int) -> Graph:
    if k < 1:
        raise GraphError("power must be at least 1")
    adj = []
    for u in range(g.vertex_count):
        dist = bfs_distances(g, u, k)
        adj.append(tuple(sorted(v for v in dist if v != u)))
    return Graph(g.vertex_count, tuple(adj))


def is_acyclic(g: Graph) -> bool:
    return g.edge_count == g.vertex_count - len(g.component_members)


def edges_acyclic(n: int, edges: Iterable[Edge]) -> bool:
    """Union-find cycle test on an undirected edge list."""
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return True


def same_classes(g: Graph, h: Graph) -> bool:
    """True iff ``E_g = E_h`` (identical component partitions)."""
    seen: dict[int, int] = {}
    for a, b in zip(g.component_ids, h.component_ids):
        if seen.setdefault(a, b) != b:
            return False
    return len(set(g.component_ids)) == len(set(h.component_ids))


def max_stretch(edges_of: Graph, metric_of: Graph) -> float:
    """``max d_{metric_of}(u, v)`` over edges ``uv`` of ``edges_of`` (0 if no edges)."""
    best = 0
    for u, nbrs in enumerate(edges_of.adjacency):
        targets = {v for v in nbrs if v > u}
        if not targets:
            continue
        if any(metric_of.component_ids[v] != metric_of.component_ids[u] for v in targets):
            return INF
        dist = _distances_to_targets(metric_of, u, targets)
        best = max(best, max(dist[v] for v in targets))
    return best


def lipschitz_constant(g: Graph, h: Graph) -> float:
    """Least ``l >= 1`` with ``h ⊆ g^l`` and ``g ⊆ h^l``; ``INF`` if none exists."""
    if g.vertex_count != h.vertex_count:
        raise GraphError("vertex-count mismatch")
    if not same_classes(g, h):
        return INF
    return max(1, max_stretch(g, h), max_stretch(h, g))


@dataclass(frozen=True)
class QuasiIsometryConstants:
    multiplicative: int
    additive: int
    codensity: int


class QuasiIsometryError(ValueError):
    """The map is not a quasi-isometry, or no witness lies in the scanned grid."""


def quasi_isometry_constants(
    mapping: Sequence[int],
    g: Graph,
    g2: Graph,
    *,
    max_multiplicative: int = 16,
    max_additive: int = 16,
) -> QuasiIsometryConstants:
    """Smallest grid witnesses ``(l, c)`` for ``mapping: (X, g) -> (Y, g2)``.

    The additive constant is scanned in the outer loop, so the reported pair
    minimises ``c`` first and then ``l``; for an injective map this finds the
    bi-Lipschitz constant at ``c = 0`` whenever it lies in the grid.
    """
    n = g.vertex_count
    if len(mapping) != n:
        raise QuasiIsometryError("map must be total on the source vertices")
    for y in mapping:
        if not 0 <= y < g2.vertex_count:
            raise QuasiIsometryError(f"image vertex {y} out of range")
    if n == 0:
        return QuasiIsometryConstants(1, 0, 0 if g2.vertex_count == 0 else _raise_codense())

    image = sorted(set(mapping))
    d_src = distance_matrix(g)
    d_img_full = distance_matrix(g2, image)
    pos = {y: i for i, y in enumerate(image)}
    rows = [pos[y] for y in mapping]
    d_dst = d_img_full[rows][:, list(mapping)]

    finite_src = np.isfinite(d_src)
    if not np.array_equal(finite_src, np.isfinite(d_dst)):
        raise QuasiIsometryError("finiteness of distances is not preserved")

    codense = d_img_full.min(axis=0) if len(image) else np.full(g2.vertex_count, np.inf)
    if g2.vertex_count and not np.all(np.isfinite(codense)):
        raise QuasiIsometryError("image is not coarsely dense")
    codensity = int(codense.max()) if g2.vertex_count else 0

    off = finite_src & ~np.eye(n, dtype=bool)
    d = d_src[off].astype(np.int64)
    dp = d_dst[off].astype(np.int64)
    for c in range(max_additive + 1):
        if d.size == 0:
            return QuasiIsometryConstants(1, c, codensity)
        # upper: dp <= l*d + c ; lower: d/l - c <= dp  <=>  d <= l*(dp + c)
        need_upper = -(-(dp - c) // d)
        denom = dp + c
        if np.any((denom == 0) & (d > 0)):
            continue
        need_lower = -(-d // np.maximum(denom, 1))
        ell = int(max(1, need_upper.max(), need_lower.max()))
        if ell <= max_multiplicative:
            return QuasiIsometryConstants(ell, c, codensity)
    raise QuasiIsometryError("no (l, c) witness within the scanned grid")


def _raise_codense():
    raise QuasiIsometryError("empty source cannot be coarsely dense in a nonempty target")
