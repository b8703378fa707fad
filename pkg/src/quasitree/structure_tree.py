"""Structure trees of treesets.

A tree vertex is an orientation: a choice of one side from every complement
pair of a component's cuts, closed upwards under inclusion.  Orientations
are stored as bitmasks over treeset indices, tagged with the component.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field, replace

from .cuts import Cut, Treeset, TreesetViolation, validate_treeset
from .graph import Graph

TreeVertex = tuple[int, int]  # (component id, mask of treeset indices)


class StructureTreeError(ValueError):
    pass


@dataclass(frozen=True)
class StructureTree:
    treeset: Treeset
    vertices: tuple[TreeVertex, ...]
    edges: tuple[tuple[int, int, int], ...]  # (u, v, i) with u \ v = {cuts[i]}
    rho_map: tuple[int, ...]
    index: dict[TreeVertex, int] = field(repr=False, compare=False)

    def orientation(self, u: int) -> frozenset[Cut]:
        mask = self.vertices[u][1]
        return frozenset(self.treeset.cuts[i] for i in _bits(mask))

    def neighbors(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in self.vertices]
        for u, v, _ in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def without_edge(self, pos: int) -> "StructureTree":
        """Copy with one edge dropped; used as a negative control."""
        return replace(self, edges=self.edges[:pos] + self.edges[pos + 1:])


def _bits(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def build_structure_tree(g: Graph, ts: Treeset) -> StructureTree:
    """Vertices are the orientations ``u_C = {D : C ⊆ D or C̄ ⊊ D}`` and their
    neighbours ``u_C △ {C, C̄}``; a component without cuts gets one vertex.
    """
    if not isinstance(ts, Treeset):
        checked = validate_treeset(g, ts)
        if isinstance(checked, TreesetViolation):
            raise StructureTreeError(f"invalid treeset: {checked.kind}")
        ts = checked
    cuts, partner = ts.cuts, ts.partner
    by_comp: dict[int, list[int]] = {}
    for i, c in enumerate(cuts):
        by_comp.setdefault(c.component, []).append(i)

    vertex_set: set[TreeVertex] = set()
    raw_edges: list[tuple[TreeVertex, TreeVertex, int]] = []
    for comp, idx in by_comp.items():
        universe = cuts[idx[0]].universe_mask
        masks = {i: cuts[i].mask for i in idx}
        for i in idx:
            if not cuts[i].is_canonical():
                continue
            mi = masks[i]
            u = 0
            for j in idx:
                mj = masks[j]
                if not (mi & ~mj) or ((mi | mj) == universe and j != partner[i]):
                    u |= 1 << j
            v = u ^ (1 << i) ^ (1 << partner[i])
            vertex_set.add((comp, u))
            vertex_set.add((comp, v))
            raw_edges.append(((comp, u), (comp, v), i))
    for comp in range(len(g.component_members)):
        if comp not in by_comp:
            vertex_set.add((comp, 0))

    rho_masks = [0] * g.vertex_count
    for i, c in enumerate(cuts):
        bit = 1 << i
        for x in c.side:
            rho_masks[x] |= bit
    vertices = tuple(sorted(vertex_set))
    index = {v: n for n, v in enumerate(vertices)}
    rho_map = []
    for x in range(g.vertex_count):
        key = (g.component_ids[x], rho_masks[x])
        if key not in index:
            raise StructureTreeError(f"rho({x}) is not among the collected orientations")
        rho_map.append(index[key])
    edges = tuple(sorted((index[a], index[b], i) for a, b, i in raw_edges))
    return StructureTree(ts, vertices, edges, tuple(rho_map), index)


def rho(st: StructureTree, x: int) -> int:
    return st.rho_map[x]


def tree_distance(st: StructureTree, u: int, v: int) -> int:
    (cu, mu), (cv, mv) = st.vertices[u], st.vertices[v]
    if cu != cv:
        raise StructureTreeError("tree vertices lie in different components")
    return (mu & ~mv).bit_count()


def _bfs_tree(adj: list[list[int]], s: int) -> dict[int, int]:
    dist = {s: 0}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


@dataclass
class StructureTreeReport:
    failures: list[str] = field(default_factory=list)
    checked_pairs: int = 0

    @property
    def ok(self) -> bool:
        return not self.failures


def validate_structure_tree(
    st: StructureTree,
    g: Graph,
    ts: Treeset,
    pairs: list[tuple[int, int]] | None = None,
) -> StructureTreeReport:
    """Check orientation axioms, tree-ness, the edge/cut bijection and the
    distance identity ``d(ρx, ρy) = #{C : x ∈ C, y ∉ C}``.

    ``pairs`` defaults to every same-component vertex pair.
    """
    rep = StructureTreeReport()
    cuts, partner = ts.cuts, ts.partner

    by_comp: dict[int, list[int]] = {}
    for i, c in enumerate(cuts):
        by_comp.setdefault(c.component, []).append(i)
    supersets = {
        i: [j for j in by_comp[c.component] if not (c.mask & ~cuts[j].mask)] for i, c in enumerate(cuts)
    }
    for n, (comp, mask) in enumerate(st.vertices):
        for i in by_comp.get(comp, ()):
            if ((mask >> i) & 1) + ((mask >> partner[i]) & 1) != 1:
                rep.failures.append(f"U1 fails at vertex {n} for cut {sorted(cuts[i].side)}")
                break
        for i in _bits(mask):
            if cuts[i].component != comp:
                rep.failures.append(f"vertex {n} holds a cut from another component")
                break
            missing = [j for j in supersets[i] if not (mask >> j) & 1]
            if missing:
                rep.failures.append(f"U2 fails at vertex {n}")
                break
        # U3: a finite orientation has no infinite strictly decreasing chain

    adj = st.neighbors()
    comp_vertices: dict[int, list[int]] = {}
    for n, (comp, _) in enumerate(st.vertices):
        comp_vertices.setdefault(comp, []).append(n)
    comp_edges: dict[int, int] = {}
    for u, v, _ in st.edges:
        cu, cv = st.vertices[u][0], st.vertices[v][0]
        if cu != cv:
            rep.failures.append("edge joins different components")
        comp_edges[cu] = comp_edges.get(cu, 0) + 1
    for comp, vs in comp_vertices.items():
        reach = _bfs_tree(adj, vs[0])
        if len([v for v in vs if v in reach]) != len(vs) or comp_edges.get(comp, 0) != len(vs) - 1:
            rep.failures.append(f"component {comp}: structure graph is not a tree")

    keyed: dict[int, int] = {}
    for u, v, i in st.edges:
        mu, mv = st.vertices[u][1], st.vertices[v][1]
        if (mu & ~mv) != (1 << i):
            rep.failures.append(f"edge ({u}, {v}) is not keyed by exactly its cut")
        pair = min(i, partner[i])
        keyed[pair] = keyed.get(pair, 0) + 1
    expected = {min(i, partner[i]) for i in range(len(cuts))}
    if set(keyed) != expected or any(c != 1 for c in keyed.values()):
        rep.failures.append("edges and complement pairs are not in bijection")

    image = set(st.rho_map)
    if any(x >= len(st.vertices) for x in image):
        rep.failures.append("rho leaves the vertex set")
        return rep

    side_masks = [0] * g.vertex_count
    for i, c in enumerate(cuts):
        for x in c.side:
            side_masks[x] |= 1 << i
    if pairs is None:
        pairs = [
            (x, y)
            for comp in g.component_members
            for x in sorted(comp)
            for y in sorted(comp)
            if x != y
        ]
    dist_from: dict[int, dict[int, int]] = {}
    for x, y in pairs:
        ux, uy = st.rho_map[x], st.rho_map[y]
        if ux not in dist_from:
            dist_from[ux] = _bfs_tree(adj, ux)
        d_tree = dist_from[ux].get(uy)
        separating = (side_masks[x] & ~side_masks[y]).bit_count()
        if d_tree != separating:
            rep.failures.append(f"distance identity fails for ({x}, {y}): tree {d_tree}, cuts {separating}")
        rep.checked_pairs += 1

    sample = sorted(image)[:24]
    for u, v in itertools.permutations(sample, 2):
        if st.vertices[u][0] != st.vertices[v][0]:
            continue
        diff = [cuts[i] for i in _bits(st.vertices[u][1] & ~st.vertices[v][1])]
        for a, b in itertools.combinations(diff, 2):
            if not (a.side <= b.side or b.side <= a.side):
                rep.failures.append(f"u \\ v not totally ordered for vertices {u}, {v}")
                break
        if tree_distance(st, u, v) != dist_from.get(u, _bfs_tree(adj, u)).get(v):
            rep.failures.append(f"|u \\ v| differs from tree distance for {u}, {v}")
    return rep
