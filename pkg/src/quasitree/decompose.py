"""Subdivision, free-product splitting, the iterated pipeline and tree extraction."""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .cuts import (
    Caps,
    Cut,
    FilterMode,
    Treeset,
    TreesetViolation,
    as_treeset,
    cut_from_side,
    enumerate_cuts,
    partition_into_treesets,
    pullback_cutset,
    restrict_cutset,
    tree_edge_cuts,
    validate_treeset,
    CutError,
)
from .graph import (
    INF,
    Edge,
    Graph,
    QuasiIsometryConstants,
    QuasiIsometryError,
    bfs_distances,
    edges_acyclic,
    eccentricity_within,
    lipschitz_constant,
    metric_diameter,
    normalize_edge,
    quasi_isometry_constants,
)
from .structure_tree import StructureTree, build_structure_tree

log = logging.getLogger(__name__)


class DecompositionError(ValueError):
    """A precondition of a decomposition step does not hold."""


@dataclass
class Certificate:
    """Named pass/fail checks collected while running the pipeline."""

    checks: list[tuple[str, bool, str]] = field(default_factory=list)

    def add(self, name: str, passed: bool, detail: str = "") -> bool:
        self.checks.append((name, bool(passed), detail))
        return bool(passed)

    @property
    def ok(self) -> bool:
        return all(p for _, p, _ in self.checks)

    def failures(self) -> list[str]:
        return [f"{n}: {d}" if d else n for n, p, d in self.checks if not p]

    def extend(self, other: "Certificate", prefix: str = "") -> None:
        self.checks.extend((prefix + n, p, d) for n, p, d in other.checks)


class CertificateError(RuntimeError):
    def __init__(self, certificate: Certificate):
        super().__init__("certificate violated: " + "; ".join(certificate.failures()))
        self.certificate = certificate


# --------------------------------------------------------------------------
# free products


def free_intersection_check(n_vertices: int, t_edges: Iterable[Edge], h_edges: Iterable[Edge]) -> bool:
    """True iff ``E_T`` and ``E_H`` intersect freely.

    Builds the bipartite multigraph with one node per ``E_T``-class and per
    ``E_H``-class and one edge ``[x]_T -- [x]_H`` per vertex; free
    intersection holds iff it is a forest (no cycles, no parallel edges).
    """
    t_cls = _class_ids(n_vertices, t_edges)
    h_cls = _class_ids(n_vertices, h_edges)
    offset = max(t_cls, default=-1) + 1
    parent = list(range(offset + max(h_cls, default=-1) + 1))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for x in range(n_vertices):
        a, b = find(t_cls[x]), find(offset + h_cls[x])
        if a == b:
            return False
        parent[a] = b
    return True


def _class_ids(n: int, edges: Iterable[Edge]) -> list[int]:
    return list(Graph.from_edges(n, edges, allow_duplicates=True).component_ids)


# --------------------------------------------------------------------------
# one-endedness modulus


@dataclass(frozen=True)
class ModulusEntry:
    k: int
    r: int
    witness: Cut | None
    cut_count: int


def one_endedness_modulus(
    g: Graph,
    k: int,
    filter_mode: FilterMode = FilterMode.IV_AND_OV,
    caps: Caps = Caps(),
    cuts: Sequence[Cut] | None = None,
) -> ModulusEntry:
    """``max`` over the cuts at scale ``k`` of ``min(diam C, diam C̄)``; 0 without cuts."""
    if cuts is None:
        cuts = enumerate_cuts(g, k, caps, filter_mode)
    best, witness = 0, None
    for c in cuts:
        if not c.is_canonical():
            continue
        comp = c.universe - c.side
        small, large = (c.side, comp) if len(c.side) <= len(comp) else (comp, c.side)
        d_small = metric_diameter(g, small)
        if d_small <= best:
            continue
        # a cheap lower bound on the larger side often settles the minimum
        probe = min(large)
        if eccentricity_within(g, probe, large) >= d_small:
            value = d_small
        else:
            value = min(d_small, metric_diameter(g, large))
        if value > best:
            best, witness = value, c
    return ModulusEntry(k, int(best), witness, len(cuts))


def modulus_profile(g: Graph, ks: Iterable[int], filter_mode=FilterMode.IV_AND_OV, caps=Caps()) -> list[ModulusEntry]:
    return [one_endedness_modulus(g, k, filter_mode, caps) for k in ks]


# --------------------------------------------------------------------------
# subdivision


@dataclass(frozen=True)
class SubdivisionResult:
    graph: Graph
    lifted: Treeset
    lift: tuple[int, ...]  # treeset index -> lifted treeset index
    gamma: tuple[int, ...]
    collapse: tuple[int, ...]
    chains: dict[Edge, tuple[int, ...]]
    inserted: dict[Edge, tuple[int, ...]]
    max_chain: int


def _chains(ts: Treeset) -> dict[Edge, list[int]]:
    chains: dict[Edge, list[int]] = {}
    for i, c in enumerate(ts.cuts):
        for a, b in c.out_edges:
            if a < b:
                chains.setdefault((a, b), []).append(i)
    for e, idx in chains.items():
        idx.sort(key=lambda i: len(ts.cuts[i].side))
        for i, j in zip(idx, idx[1:]):
            if not ts.cuts[i].side < ts.cuts[j].side:
                raise DecompositionError(f"cuts separating edge {e} are not a chain")
    return chains


def subdivide(g: Graph, ts: Treeset) -> SubdivisionResult:
    """Insert vertices on every edge separated by several cuts, so that each
    new edge is separated by at most one lifted cut.

    The edge ``(x0, x1)``, ``x0 < x1``, separated by the chain
    ``C_0 ⊊ ... ⊊ C_n`` becomes the path ``x0, y_1, ..., y_n, x1``.  New
    vertices are numbered after the originals, edge by edge in lexicographic
    order.
    """
    if not isinstance(ts, Treeset):
        ts = as_treeset(g, ts)
    chains = _chains(ts)
    n = g.vertex_count
    next_id = n
    inserted: dict[Edge, tuple[int, ...]] = {}
    collapse = list(range(n))
    edges: list[Edge] = []
    for x0, x1 in g.edges():
        chain = chains.get((x0, x1), ())
        m = max(len(chain) - 1, 0)
        if m == 0:
            edges.append((x0, x1))
            continue
        ys = tuple(range(next_id, next_id + m))
        next_id += m
        inserted[(x0, x1)] = ys
        path = (x0, *ys, x1)
        edges.extend(zip(path, path[1:]))
        for i, _ in enumerate(ys, start=1):
            # nearer endpoint, ties to the smaller index
            collapse.append(x0 if i <= m + 1 - i else x1)
    gy = Graph.from_edges(next_id, edges)

    position = {e: {c: j for j, c in enumerate(chains[e])} for e in inserted}
    lifted_sides = []
    for i, c in enumerate(ts.cuts):
        side = set(c.side)
        p = ts.partner[i]
        for e, ys in inserted.items():
            pos = position[e]
            if i in pos:
                j = pos[i]
                side.update(ys[:j])
            elif p in pos:
                j = pos[p]
                side.update(ys[j:])
            elif e[0] in c.side:
                side.update(ys)
        lifted_sides.append(cut_from_side(gy, side))
    lifted = validate_treeset(gy, lifted_sides)
    if isinstance(lifted, TreesetViolation):
        raise DecompositionError(f"lifted family is not a treeset: {lifted.kind}")
    lift = tuple(lifted.index[c.side] for c in lifted_sides)

    max_chain = max((len(v) for v in chains.values()), default=0)
    for e, count in _separation_counts(lifted).items():
        if count > 1:
            raise DecompositionError(f"subdivided edge {e} still separated by {count} cuts")
    for i, c in enumerate(ts.cuts):
        near = bfs_distances(gy, c.inner_boundary, max_chain)
        if not lifted.cuts[lift[i]].inner_boundary <= near.keys():
            raise DecompositionError("lifted inner boundary escapes the expected neighbourhood")
    return SubdivisionResult(
        graph=gy,
        lifted=lifted,
        lift=lift,
        gamma=tuple(range(n)),
        collapse=tuple(collapse),
        chains={e: tuple(v) for e, v in chains.items()},
        inserted=inserted,
        max_chain=max_chain,
    )


def _separation_counts(ts: Treeset) -> dict[Edge, int]:
    counts: dict[Edge, int] = {}
    for i in ts.canonical:
        for a, b in ts.cuts[i].out_edges:
            e = normalize_edge(a, b)
            counts[e] = counts.get(e, 0) + 1
    return counts


# --------------------------------------------------------------------------
# splitting


@dataclass(frozen=True)
class Decomposition:
    host: Graph
    t_edges: tuple[Edge, ...]
    h_edges: tuple[Edge, ...]
    r: int
    measured_lipschitz: float
    structure_tree: StructureTree
    augmented: Graph
    certificate: Certificate

    @property
    def lipschitz_bound(self) -> int:
        return 3 * max(self.r, 1)


def split(g1: Graph, ts: Treeset, *, strict: bool = True) -> Decomposition:
    """Split ``g1`` into an acyclic part ``T`` and a remainder ``H``.

    ``T`` takes, for each complement pair, the least boundary edge of its
    canonical side.  ``H`` keeps the edges of ``g1`` plus cliques on every
    inner boundary whose endpoints have the same orientation.
    """
    if not isinstance(ts, Treeset):
        ts = as_treeset(g1, ts)
    for e, count in _separation_counts(ts).items():
        if count > 1:
            raise DecompositionError(f"edge {e} is separated by {count} cuts; subdivide first")
    st = build_structure_tree(g1, ts)
    r = max((int(metric_diameter(g1, c.inner_boundary)) for c in ts.cuts), default=0)

    t_edges = sorted({ts.cuts[i].min_boundary_edge for i in ts.canonical})
    aug = set(g1.edges())
    for c in ts.cuts:
        inner = sorted(c.inner_boundary)
        for a_pos, a in enumerate(inner):
            for b in inner[a_pos + 1:]:
                aug.add((a, b))
    augmented = Graph.from_edges(g1.vertex_count, sorted(aug))
    rho = st.rho_map
    h_edges = sorted(e for e in aug if rho[e[0]] == rho[e[1]])
    host = Graph.from_edges(g1.vertex_count, sorted(set(t_edges) | set(h_edges)))
    h_graph = Graph.from_edges(g1.vertex_count, h_edges)

    cert = Certificate()
    cert.add("T acyclic", edges_acyclic(g1.vertex_count, t_edges))
    cert.add("T and H intersect freely", free_intersection_check(g1.vertex_count, t_edges, h_edges))
    leftover = restrict_cutset(ts.cuts, h_graph)
    cert.add("treeset restricted to H is empty", not leftover, f"{len(leftover)} cuts survive")
    measured = lipschitz_constant(g1, host)
    cert.add(
        "host Lipschitz within 3r",
        measured <= 3 * max(r, 1),
        f"measured {measured}, r = {r}",
    )
    tree_edges = {(rho[a], rho[b]) for a, b in g1.edges() if rho[a] != rho[b]}
    tree_edges |= {(v, u) for u, v in tree_edges}
    st_edges = {(u, v) for u, v, _ in st.edges} | {(v, u) for u, v, _ in st.edges}
    cert.add("rho is a 1-surjective simplicial map", tree_edges == st_edges)
    if strict and not cert.ok:
        raise CertificateError(cert)
    return Decomposition(host, tuple(t_edges), tuple(h_edges), r, measured, st, augmented, cert)


# --------------------------------------------------------------------------
# pipeline


@dataclass(frozen=True)
class Stage:
    index: int
    cut_count: int
    subdivision: SubdivisionResult
    decomposition: Decomposition
    graph: Graph  # accumulated T together with the current H
    t_edges: tuple[Edge, ...]
    h_edges: tuple[Edge, ...]
    qi: QuasiIsometryConstants | None
    certificate: Certificate


@dataclass(frozen=True)
class PipelineResult:
    source: Graph
    k: int
    filter_mode: FilterMode
    initial_cut_count: int
    treeset_sizes: tuple[int, ...]
    stages: tuple[Stage, ...]
    graph: Graph
    t_edges: tuple[Edge, ...]
    h_edges: tuple[Edge, ...]
    gamma: tuple[int, ...]
    collapse: tuple[int, ...]
    certificate: Certificate

    @property
    def vertex_count(self) -> int:
        return self.graph.vertex_count

    @property
    def h_graph(self) -> Graph:
        return Graph.from_edges(self.graph.vertex_count, self.h_edges)


def accessibility_pipeline(
    g: Graph,
    k: int,
    caps: Caps = Caps(),
    filter_mode: FilterMode = FilterMode.IV_AND_OV,
    *,
    strict: bool = True,
    reenumerate: bool = False,
    max_stages: int = 64,
    qi_grid: tuple[int, int] = (16, 16),
) -> PipelineResult:
    """Split off one treeset at a time until no cut at scale ``k`` is left.

    The cutset of ``g`` is partitioned into treesets once.  Each stage
    subdivides the current remainder ``H`` for the next treeset, splits it,
    keeps the new acyclic part together with the earlier ones, and carries
    the remaining treesets forward by preimage under the collapse map
    followed by restriction to the new ``H``.  With ``reenumerate`` the
    remaining treesets are instead recomputed from the new ``H`` (a
    comparison mode, bounded by ``max_stages``).
    """
    cuts = enumerate_cuts(g, k, caps, filter_mode)
    pending = partition_into_treesets(g, cuts)
    sizes = tuple(len(t) for t in pending)
    cert = Certificate()
    n = g.vertex_count
    current_h = g
    t_acc: list[Edge] = []
    collapse_total = list(range(n))
    stages: list[Stage] = []
    graph_i = g
    h_edges: list[Edge] = list(g.edges())

    while pending:
        if len(stages) >= max_stages:
            cert.add("pipeline terminated", False, f"stopped after {max_stages} stages")
            break
        ts = pending.pop(0)
        sub = subdivide(current_h, ts)
        dec = split(sub.graph, sub.lifted, strict=False)
        y_count = sub.graph.vertex_count
        t_acc = sorted(set(t_acc) | set(dec.t_edges))
        h_edges = list(dec.h_edges)
        h_graph = Graph.from_edges(y_count, h_edges)
        graph_i = Graph.from_edges(y_count, sorted(set(t_acc) | set(h_edges)))
        collapse_total = [collapse_total[x] for x in sub.collapse]

        sc = Certificate()
        sc.extend(dec.certificate, "split: ")
        sc.add("accumulated T acyclic", edges_acyclic(y_count, t_acc))
        sc.add("accumulated T and H intersect freely", free_intersection_check(y_count, t_acc, h_edges))
        try:
            tree_edge_cuts(graph_i, t_acc, h_edges)
            sc.add("every T-edge bounds a unique cut", True)
        except CutError as exc:
            sc.add("every T-edge bounds a unique cut", False, str(exc))
        gamma = list(range(n))
        sc.add("composite embedding injective", len(set(gamma)) == n and all(collapse_total[x] == x for x in gamma))
        qi = None
        try:
            qi = quasi_isometry_constants(
                gamma, g, graph_i, max_multiplicative=qi_grid[0], max_additive=qi_grid[1]
            )
            sc.add("composite embedding is a quasi-isometry", True, f"l={qi.multiplicative} c={qi.additive}")
        except QuasiIsometryError as exc:
            sc.add("composite embedding is a quasi-isometry", False, str(exc))

        if reenumerate:
            fresh = enumerate_cuts(h_graph, k, caps, filter_mode)
            pending = partition_into_treesets(h_graph, fresh)
        else:
            carried = []
            for j, other in enumerate(pending):
                moved = restrict_cutset(pullback_cutset(sub.collapse, other.cuts, sub.graph), h_graph)
                checked = validate_treeset(h_graph, moved)
                ok = sc.add(f"transported treeset {len(stages) + 1 + j} is a treeset", isinstance(checked, Treeset))
                carried.append(checked if ok else as_treeset(h_graph, []))
            pending = carried

        stage = Stage(
            index=len(stages),
            cut_count=len(ts),
            subdivision=sub,
            decomposition=dec,
            graph=graph_i,
            t_edges=tuple(t_acc),
            h_edges=tuple(h_edges),
            qi=qi,
            certificate=sc,
        )
        log.debug("stage %d: %d cuts, |Y|=%d, ok=%s", stage.index, len(ts), y_count, sc.ok)
        stages.append(stage)
        cert.extend(sc, f"stage {stage.index}: ")
        current_h = h_graph
        if strict and not sc.ok:
            raise CertificateError(cert)

    return PipelineResult(
        source=g,
        k=k,
        filter_mode=filter_mode,
        initial_cut_count=len(cuts),
        treeset_sizes=sizes,
        stages=tuple(stages),
        graph=graph_i,
        t_edges=tuple(t_acc),
        h_edges=tuple(sorted(h_edges)),
        gamma=tuple(range(n)),
        collapse=tuple(collapse_total),
        certificate=cert,
    )


# --------------------------------------------------------------------------
# tree extraction


def spanning_forest_of_classes(g_y: Graph | int, h_edges: Iterable[Edge]) -> list[Edge]:
    """BFS spanning tree of every ``H``-class, rooted at its least vertex."""
    n = g_y if isinstance(g_y, int) else g_y.vertex_count
    h = Graph.from_edges(n, h_edges, allow_duplicates=True)
    seen = [False] * n
    out = []
    for root in range(n):
        if seen[root]:
            continue
        seen[root] = True
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v in h.adjacency[u]:
                if not seen[v]:
                    seen[v] = True
                    out.append(normalize_edge(u, v))
                    queue.append(v)
    return sorted(out)


class ContractError(ValueError):
    pass


def nearest_image_collapse(tp: Graph, gamma: Sequence[int]) -> list[int]:
    """For each vertex, the least source vertex whose image is nearest in ``tp``."""
    if len(set(gamma)) != len(gamma):
        raise ContractError("embedding is not injective")
    lam = [-1] * tp.vertex_count
    frontier = []
    for x, y in enumerate(gamma):
        lam[y] = x
        frontier.append(y)
    while frontier:
        best: dict[int, int] = {}
        for u in frontier:
            for v in tp.adjacency[u]:
                if lam[v] == -1:
                    best[v] = min(best.get(v, lam[u]), lam[u])
        for v, x in best.items():
            lam[v] = x
        frontier = sorted(best)
    missing = [y for y, x in enumerate(lam) if x == -1]
    if missing:
        raise ContractError(f"vertex {missing[0]} cannot reach the embedded vertices")
    return lam


def contract(g_y: Graph, tp_edges: Iterable[Edge], gamma: Sequence[int]) -> list[Edge]:
    """Contract each fibre of the nearest-image collapse to its source vertex."""
    tp_edges = sorted({normalize_edge(a, b) for a, b in tp_edges})
    if not edges_acyclic(g_y.vertex_count, tp_edges):
        raise ContractError("T' is not acyclic")
    tp = Graph.from_edges(g_y.vertex_count, tp_edges)
    lam = nearest_image_collapse(tp, gamma)
    n = len(gamma)
    fibre_size = [0] * n
    for x in lam:
        fibre_size[x] += 1
    inner_edges = [0] * n
    out: set[Edge] = set()
    for a, b in tp_edges:
        if lam[a] == lam[b]:
            inner_edges[lam[a]] += 1
        else:
            e = normalize_edge(lam[a], lam[b])
            if e in out:
                raise ContractError(f"two T'-edges join the fibres of {e}")
            out.add(e)
    bad = [x for x in range(n) if inner_edges[x] != fibre_size[x] - 1]
    if bad:
        raise ContractError(f"fibre of {bad[0]} is not T'-connected")
    result = sorted(out)
    if not edges_acyclic(n, result):
        raise ContractError("contracted graph has a cycle")
    return result


@dataclass(frozen=True)
class TreeifyResult:
    tree: Graph
    lipschitz: float
    certificate: Certificate
    pipeline: PipelineResult
    t2_edges: tuple[Edge, ...]

    @property
    def stage_count(self) -> int:
        return len(self.pipeline.stages)


def treeify(
    g: Graph,
    k: int,
    caps: Caps = Caps(),
    filter_mode: FilterMode = FilterMode.IV_AND_OV,
    *,
    strict: bool = True,
    reenumerate: bool = False,
) -> TreeifyResult:
    """Acyclic graph on the vertices of ``g`` obtained from the pipeline output."""
    pipe = accessibility_pipeline(g, k, caps, filter_mode, strict=strict, reenumerate=reenumerate)
    cert = Certificate()
    cert.extend(pipe.certificate)
    y = pipe.graph
    t2 = spanning_forest_of_classes(y, pipe.h_edges)
    tp = sorted(set(pipe.t_edges) | set(t2))
    cert.add("T' = T * T2 acyclic", edges_acyclic(y.vertex_count, tp))
    cert.add("T and T2 intersect freely", free_intersection_check(y.vertex_count, pipe.t_edges, t2))
    tree_edges = contract(y, tp, pipe.gamma)
    tree = Graph.from_edges(g.vertex_count, tree_edges)
    cert.add("output acyclic", tree.edge_count == g.vertex_count - len(tree.component_members))
    cert.add("output spans the input components", tuple(tree.component_ids) == tuple(g.component_ids))
    constant = lipschitz_constant(g, tree)
    cert.add("Lipschitz constant finite", constant != INF, f"{constant}")
    if strict and not cert.ok:
        raise CertificateError(cert)
    return TreeifyResult(tree, constant, cert, pipe, tuple(t2))
