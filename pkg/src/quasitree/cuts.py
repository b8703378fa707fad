"""Cuts, bounded-boundary cut enumeration, treesets and cutset transport."""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .graph import INF, Edge, Graph, GraphError, ball, bfs_distances, edges_acyclic, metric_diameter, normalize_edge


class FilterMode(enum.Enum):
    """Which boundary must have small diameter for a cut to be kept."""

    IV_ONLY = "iv"
    IV_AND_OV = "ivov"


class CutError(ValueError):
    pass


class CapExceeded(RuntimeError):
    """Enumeration would exceed a configured search limit."""

    def __init__(self, message: str, anchor: int | None = None):
        super().__init__(message if anchor is None else f"{message} (anchor vertex {anchor})")
        self.anchor = anchor


@dataclass(frozen=True)
class Caps:
    max_ball: int = 64
    max_components: int = 12
    max_cuts: int = 200_000


@dataclass(frozen=True, eq=False)
class Cut:
    """One side of a bipartition of a connected component.

    Equality and hashing use the side alone; everything else is derived.
    """

    side: frozenset[int]
    component: int
    universe: frozenset[int] = field(repr=False)
    inner_boundary: frozenset[int] = field(repr=False)
    outer_boundary: frozenset[int] = field(repr=False)
    out_edges: tuple[Edge, ...] = field(repr=False)

    def __eq__(self, other):
        return isinstance(other, Cut) and self.side == other.side

    def __hash__(self):
        return hash(self.side)

    @property
    def in_edges(self) -> tuple[Edge, ...]:
        return tuple(sorted((b, a) for a, b in self.out_edges))

    @cached_property
    def mask(self) -> int:
        return _mask(self.side)

    @cached_property
    def universe_mask(self) -> int:
        return _mask(self.universe)

    @cached_property
    def key(self) -> tuple[int, tuple[int, ...]]:
        return (self.component, tuple(sorted(self.side)))

    @cached_property
    def boundary_vertices(self) -> frozenset[int]:
        return self.inner_boundary | self.outer_boundary

    @cached_property
    def min_boundary_edge(self) -> Edge:
        return min(normalize_edge(a, b) for a, b in self.out_edges)

    def complement(self) -> "Cut":
        return Cut(
            side=self.universe - self.side,
            component=self.component,
            universe=self.universe,
            inner_boundary=self.outer_boundary,
            outer_boundary=self.inner_boundary,
            out_edges=self.in_edges,
        )

    def is_canonical(self) -> bool:
        """The canonical side of a pair holds the smaller end of the least boundary edge."""
        return self.min_boundary_edge[0] in self.side


def _mask(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def cut_from_side(g: Graph, side: Iterable[int]) -> Cut:
    side = frozenset(side)
    if not side:
        raise CutError("cut side is empty")
    for v in side:
        g.check_vertex(v)
    comp_ids = {g.component_ids[v] for v in side}
    if len(comp_ids) > 1:
        raise CutError("cut side spans several components")
    (comp,) = comp_ids
    universe = g.component_members[comp]
    if len(side) == len(universe):
        raise CutError("cut side is the whole component")
    small, flipped = (side, False) if 2 * len(side) <= len(universe) else (universe - side, True)
    inner, outer, oe = set(), set(), []
    for a in small:
        for b in g.adjacency[a]:
            if b not in small:
                inner.add(a)
                outer.add(b)
                oe.append((a, b))
    if flipped:
        inner, outer = outer, inner
        oe = [(b, a) for a, b in oe]
    return Cut(
        side=side,
        component=comp,
        universe=universe,
        inner_boundary=frozenset(inner),
        outer_boundary=frozenset(outer),
        out_edges=tuple(sorted(oe)),
    )


def side_from_out_edges(g: Graph, out_edges: Iterable[Edge]) -> frozenset[int]:
    """Recover a cut from its outgoing edge boundary alone.

    Removes the boundary edges and collects everything reachable from their
    tails; a genuine cut is reproduced exactly.
    """
    oe = list(out_edges)
    removed = {normalize_edge(a, b) for a, b in oe}
    start = {a for a, _ in oe}
    seen = set(start)
    queue = deque(start)
    while queue:
        u = queue.popleft()
        for v in g.adjacency[u]:
            if v not in seen and normalize_edge(u, v) not in removed:
                seen.add(v)
                queue.append(v)
    return frozenset(seen)


def passes_filter(g: Graph, cut: Cut, k: int, mode: FilterMode) -> bool:
    if mode is FilterMode.IV_AND_OV:
        return metric_diameter(g, cut.boundary_vertices) <= k
    return (
        metric_diameter(g, cut.inner_boundary) <= k
        or metric_diameter(g, cut.outer_boundary) <= k
    )


def sort_cuts(cuts: Iterable[Cut]) -> list[Cut]:
    return sorted(cuts, key=lambda c: c.key)


def dedupe(cuts: Iterable[Cut]) -> list[Cut]:
    seen: dict[frozenset[int], Cut] = {}
    for c in cuts:
        seen.setdefault(c.side, c)
    return sort_cuts(seen.values())


# --------------------------------------------------------------------------
# enumeration


class _NearCache:
    def __init__(self, g: Graph, k: int):
        self.g, self.k = g, k
        self._near: dict[int, frozenset[int]] = {}

    def near(self, v: int) -> frozenset[int]:
        s = self._near.get(v)
        if s is None:
            s = self._near[v] = frozenset(bfs_distances(self.g, v, self.k))
        return s


def enumerate_cuts(
    g: Graph,
    k: int,
    caps: Caps = Caps(),
    mode: FilterMode = FilterMode.IV_AND_OV,
) -> list[Cut]:
    """All cuts whose boundary passes the diameter filter at scale ``k``.

    With ``IV_AND_OV`` a cut is kept when ``diam(∂iv C ∪ ∂ov C) <= k``.  With
    ``IV_ONLY`` it is kept when ``diam(∂iv C) <= k`` and the family is then
    closed under complementation.  The result is complement-closed,
    deduplicated and sorted by :attr:`Cut.key`.

    Each cut is found once, from the anchor ``x`` = least vertex of the
    constrained boundary.  Edges that cannot cross at that anchor glue their
    endpoints together; the remaining label choices are searched with
    pairwise-distance pruning.
    """
    if k < 0:
        raise CutError("k must be non-negative")
    near = _NearCache(g, k)
    found: dict[frozenset[int], Cut] = {}
    for x in range(g.vertex_count):
        if len(g.component_members[g.component_ids[x]]) < 2:
            continue
        for side in _cuts_at_anchor(g, x, k, mode, caps, near):
            if side in found:
                continue
            cut = cut_from_side(g, side)
            found[side] = cut
            comp = cut.complement()
            found.setdefault(comp.side, comp)
            if len(found) > caps.max_cuts:
                raise CapExceeded(f"more than {caps.max_cuts} cuts", anchor=x)
    return sort_cuts(found.values())


def _cuts_at_anchor(g, x, k, mode, caps, near):
    reach_in = bfs_distances(g, x, k)
    allowed_in = frozenset(v for v in reach_in if v >= x)
    if mode is FilterMode.IV_AND_OV:
        region_size = len(reach_in)
        allowed_out = allowed_in
    else:
        reach_out = bfs_distances(g, x, k + 1)
        region_size = len(reach_out)
        allowed_out = frozenset(reach_out)
    if region_size > caps.max_ball:
        raise CapExceeded(f"search ball has {region_size} > {caps.max_ball} vertices", anchor=x)
    region = allowed_in | allowed_out

    def crossable(u, v):
        return (u in allowed_in and v in allowed_out) or (v in allowed_in and u in allowed_out)

    # glue: vertices outside the region are grouped by connected piece
    comp_members = g.component_members[g.component_ids[x]]
    group: dict[int, int] = {}
    pieces = 0
    for s in sorted(comp_members - region):
        if s in group:
            continue
        group[s] = pieces
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in g.adjacency[u]:
                if v not in region and v not in group:
                    group[v] = pieces
                    queue.append(v)
        pieces += 1
    if pieces > caps.max_components:
        raise CapExceeded(f"{pieces} > {caps.max_components} components outside the search ball", anchor=x)

    # union-find over piece ids and region vertices (region vertex v -> id pieces + index)
    region_list = sorted(region)
    rid = {v: pieces + i for i, v in enumerate(region_list)}
    parent = list(range(pieces + len(region_list)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def node(v):
        return rid[v] if v in rid else group[v]

    cross_edges = []
    for u in region_list:
        for v in g.adjacency[u]:
            if v in region:
                if u < v:
                    if crossable(u, v):
                        cross_edges.append((u, v))
                    else:
                        parent[find(rid[u])] = find(rid[v])
            else:
                parent[find(rid[u])] = find(group[v])

    roots = sorted({find(i) for i in range(len(parent))})
    if len(roots) < 2:
        return
    members: dict[int, list[int]] = {r: [] for r in roots}
    for v in comp_members:
        members[find(node(v))].append(v)

    adj: dict[int, list[tuple[int, int, int]]] = {r: [] for r in roots}
    for u, v in cross_edges:
        ru, rv = find(rid[u]), find(rid[v])
        if ru != rv:
            adj[ru].append((rv, u, v))
            adj[rv].append((ru, v, u))

    start = find(rid[x])
    order = [start]
    seen = {start}
    for r in order:
        for t, _, _ in adj[r]:
            if t not in seen:
                seen.add(t)
                order.append(t)
    if len(order) != len(roots):
        # cannot happen for a connected component; guard against silent loss
        raise CutError("internal: glued nodes are not connected through crossable edges")

    label: dict[int, int] = {}
    inner: list[int] = []
    outer: list[int] = []
    in_count: dict[int, int] = {}
    out_count: dict[int, int] = {}
    constrained_ov = mode is FilterMode.IV_AND_OV

    def add(v, bucket, counts, others):
        # returns False if adding v breaks the diameter bound
        c = counts.get(v, 0)
        if c == 0:
            nv = near.near(v)
            for w in others:
                if w not in nv:
                    return False
        counts[v] = c + 1
        if c == 0:
            bucket.append(v)
        return True

    def remove(v, bucket, counts):
        c = counts[v] - 1
        if c == 0:
            del counts[v]
            bucket.remove(v)
        else:
            counts[v] = c

    def constrained(is_inner):
        if constrained_ov:
            return inner + outer
        return inner if is_inner else ()

    def assign(pos):
        if pos == len(order):
            if x in in_count and any(label[r] == 0 for r in order):
                side = []
                for r in order:
                    if label[r]:
                        side.extend(members[r])
                yield frozenset(side)
            return
        r = order[pos]
        for lab in (1, 0):
            label[r] = lab
            added = []
            ok = True
            for t, a, b in adj[r]:
                if t not in label or label[t] == lab:
                    continue
                c_end, o_end = (a, b) if lab == 1 else (b, a)
                if c_end not in allowed_in or o_end not in allowed_out:
                    ok = False
                    break
                if not add(c_end, inner, in_count, constrained(True)):
                    ok = False
                    break
                added.append(("i", c_end))
                if constrained_ov:
                    if not add(o_end, outer, out_count, inner + outer):
                        ok = False
                        break
                else:
                    out_count[o_end] = out_count.get(o_end, 0) + 1
                    if out_count[o_end] == 1:
                        outer.append(o_end)
                added.append(("o", o_end))
            if ok:
                yield from assign(pos + 1)
            for kind, v in reversed(added):
                if kind == "i":
                    remove(v, inner, in_count)
                else:
                    remove(v, outer, out_count)
            del label[r]

    # the anchor's glued node is always on the inside
    label[start] = 1
    yield from assign(1)


# --------------------------------------------------------------------------
# nestedness and treesets


def is_nested(a: Cut, b: Cut) -> bool:
    """Four-corner test; cuts of different components count as nested."""
    if a.component != b.component:
        return True
    u = a.universe_mask
    am, bm = a.mask, b.mask
    ac, bc = u ^ am, u ^ bm
    return not (am & bm) or not (am & bc) or not (ac & bm) or not (ac & bc)


def _candidate_pairs(g: Graph, cuts: Sequence[Cut]) -> Iterable[tuple[int, int]]:
    """Index pairs that might fail to be nested.

    Let ``r`` be the largest diameter of a boundary (inner plus outer
    vertices).  Cuts ``C``, ``D`` fail to be nested only if the boundary of
    one straddles the other, and then a geodesic of length ``<= r`` between
    two of ``D``'s boundary vertices crosses an edge of ``∂C``.  That puts
    the anchors (least boundary vertices) within ``r + r/2 + r`` of each
    other, so pairs with anchors farther apart than ``5r/2`` are skipped.
    """
    if len(cuts) < 64:
        for i in range(len(cuts)):
            for j in range(i + 1, len(cuts)):
                if cuts[i].component == cuts[j].component:
                    yield i, j
        return
    r = 0
    by_anchor: dict[int, list[int]] = {}
    for i, c in enumerate(cuts):
        r = max(r, metric_diameter(g, c.boundary_vertices))
        by_anchor.setdefault(min(c.boundary_vertices), []).append(i)
    for a, idx in by_anchor.items():
        near = bfs_distances(g, a, (5 * r) // 2)
        for b in near:
            if b < a or b not in by_anchor:
                continue
            other = by_anchor[b]
            for i in idx:
                for j in other:
                    if a != b or i < j:
                        yield (i, j) if i < j else (j, i)


class TreesetError(ValueError):
    pass


@dataclass(frozen=True)
class TreesetViolation:
    """Why a cutset is not a treeset: ``kind`` is ``"missing_complement"`` or ``"not_nested"``."""

    kind: str
    cuts: tuple[Cut, ...]


@dataclass(frozen=True)
class Treeset:
    """Complement-closed, pairwise nested cutset.

    ``partner[i]`` is the index of the complement of ``cuts[i]``.
    """

    cuts: tuple[Cut, ...]
    partner: tuple[int, ...]

    def __len__(self):
        return len(self.cuts)

    def __iter__(self):
        return iter(self.cuts)

    @cached_property
    def index(self) -> dict[frozenset[int], int]:
        return {c.side: i for i, c in enumerate(self.cuts)}

    @cached_property
    def canonical(self) -> tuple[int, ...]:
        """Index of the canonical side of each complement pair, in cut order."""
        return tuple(i for i, c in enumerate(self.cuts) if c.is_canonical())

    @property
    def pair_count(self) -> int:
        return len(self.cuts) // 2


def _pair_up(cuts: Sequence[Cut]) -> tuple[int, ...] | Cut:
    idx = {c.side: i for i, c in enumerate(cuts)}
    partner = []
    for c in cuts:
        j = idx.get(c.universe - c.side)
        if j is None:
            return c
        partner.append(j)
    return tuple(partner)


def validate_treeset(g: Graph, cs: Iterable[Cut]) -> Treeset | TreesetViolation:
    """Check complement closure, then pairwise nestedness.

    Finite separation holds automatically for finite families.
    """
    cuts = tuple(dedupe(cs))
    partner = _pair_up(cuts)
    if isinstance(partner, Cut):
        return TreesetViolation("missing_complement", (partner,))
    for i, j in sorted(_candidate_pairs(g, cuts)):
        if not is_nested(cuts[i], cuts[j]):
            return TreesetViolation("not_nested", (cuts[i], cuts[j]))
    return Treeset(cuts, partner)


def as_treeset(g: Graph, cs: Iterable[Cut]) -> Treeset:
    res = validate_treeset(g, cs)
    if isinstance(res, TreesetViolation):
        raise TreesetError(f"not a treeset: {res.kind} {[sorted(c.side) for c in res.cuts]}")
    return res


def canonical_side(cut: Cut) -> Cut:
    return cut if cut.is_canonical() else cut.complement()


def conflict_graph(g: Graph, cs: Iterable[Cut]) -> tuple[list[Cut], list[list[int]]]:
    """Canonical representatives (sorted by key) and their non-nestedness adjacency."""
    cuts = dedupe(cs)
    if isinstance(_pair_up(cuts), Cut):
        raise TreesetError("cutset is not closed under complementation")
    reps = sort_cuts(c for c in cuts if c.is_canonical())
    adj: list[list[int]] = [[] for _ in reps]
    for i, j in _candidate_pairs(g, reps):
        if not is_nested(reps[i], reps[j]):
            adj[i].append(j)
            adj[j].append(i)
    return reps, adj


def partition_into_treesets(g: Graph, cs: Iterable[Cut]) -> list[Treeset]:
    """Greedy colouring of the conflict graph, in ascending representative key.

    Uses at most (max conflict degree + 1) colours; each colour class plus
    complements is a treeset.
    """
    reps, adj = conflict_graph(g, cs)
    color = [-1] * len(reps)
    for i in range(len(reps)):
        used = {color[j] for j in adj[i] if color[j] >= 0}
        c = 0
        while c in used:
            c += 1
        color[i] = c
    n_colors = max(color, default=-1) + 1
    out = []
    for c in range(n_colors):
        members = []
        for i, rep in enumerate(reps):
            if color[i] == c:
                members.append(rep)
                members.append(rep.complement())
        out.append(as_treeset(g, members))
    return out


# --------------------------------------------------------------------------
# queries on cutsets


def separating_cuts(cs: Iterable[Cut], x: int, y: int) -> list[Cut]:
    return [c for c in cs if x in c.side and y not in c.side]


def cut_census_at_vertex(cs: Iterable[Cut], x: int) -> int:
    return sum(1 for c in cs if x in c.inner_boundary)


def census_bound_holds(census: int, max_degree: int, r: int) -> bool:
    """``census <= 2 ** (d ** (r + 2))`` without materialising the power."""
    if census <= 1:
        return True
    exponent = max_degree ** (r + 2)
    return (census - 1).bit_length() <= exponent


# --------------------------------------------------------------------------
# transport


def pullback_cutset(collapse: Sequence[int], cs: Iterable[Cut], g_y: Graph) -> list[Cut]:
    """Preimages of the cuts under ``collapse: Y -> X``, recomputed in ``g_y``.

    Preimages that are empty or a whole component are dropped.
    """
    if len(collapse) != g_y.vertex_count:
        raise CutError("collapse map must be total on Y")
    fibers: dict[int, list[int]] = {}
    for y, x in enumerate(collapse):
        fibers.setdefault(x, []).append(y)
    out = []
    for c in cs:
        pre = frozenset(y for x in c.side for y in fibers.get(x, ()))
        if not pre:
            continue
        comps = {g_y.component_ids[y] for y in pre}
        if len(comps) > 1:
            raise CutError("preimage of a cut spans several components of the target graph")
        if len(pre) == len(g_y.component_members[comps.pop()]):
            continue
        out.append(cut_from_side(g_y, pre))
    return dedupe(out)


def restrict_cutset(cs: Iterable[Cut], h: Graph) -> list[Cut]:
    """Intersections of each cut with each class of ``h``, keeping proper ones."""
    out = []
    for c in cs:
        by_class: dict[int, list[int]] = {}
        for v in c.side:
            by_class.setdefault(h.component_ids[v], []).append(v)
        for cls, part in by_class.items():
            if len(part) < len(h.component_members[cls]):
                out.append(cut_from_side(h, part))
    return dedupe(out)


def tree_edge_cuts(gp: Graph, t_edges: Iterable[Edge], h_edges: Iterable[Edge] = ()) -> dict[Edge, Cut]:
    """For each oriented edge ``(a, b)`` of ``t_edges`` the cut with ``∂oe = {(a, b)}``.

    The side is everything reachable from ``a`` without using the edge.
    Raises :class:`CutError` when ``b`` is still reachable, i.e. the edge lies
    on a cycle and no such cut exists.
    """
    t = sorted({normalize_edge(a, b) for a, b in t_edges})
    if not edges_acyclic(gp.vertex_count, t):
        raise CutError("T is not acyclic")
    h = {normalize_edge(a, b) for a, b in h_edges}
    if h & set(t):
        raise CutError("T and H share an edge")
    for a, b in t:
        if not gp.has_edge(a, b):
            raise CutError(f"T-edge ({a}, {b}) is not an edge of the host graph")
    out: dict[Edge, Cut] = {}
    for a, b in t:
        for s, e in ((a, b), (b, a)):
            seen = {s}
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for v in gp.adjacency[u]:
                    if v in seen or (u == s and v == e):
                        continue
                    seen.add(v)
                    queue.append(v)
            if e in seen:
                raise CutError(f"edge ({s}, {e}) lies on a cycle; no cut has it as sole boundary edge")
            cut = cut_from_side(gp, seen)
            if cut.out_edges != ((s, e),):
                raise CutError(f"cut for ({s}, {e}) has boundary {cut.out_edges}")
            out[(s, e)] = cut
    return out
