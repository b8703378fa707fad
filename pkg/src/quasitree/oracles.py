"""Deliberately naive reference computations.

Nothing here calls into the fast paths: distances come from a local BFS,
cuts from a full subset scan, and free intersection from a word search.
Only the :class:`~quasitree.graph.Graph` container is shared.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Sequence

import numpy as np

from .graph import Graph

MAX_ORACLE_COMPONENT = 18
_CHUNK = 1 << 20


class OracleLimitError(ValueError):
    pass


def _bfs(g: Graph, s: int) -> dict[int, int]:
    dist = {s: 0}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for v in g.adjacency[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def _classes(g: Graph) -> list[list[int]]:
    seen: set[int] = set()
    out = []
    for s in range(g.vertex_count):
        if s not in seen:
            members = sorted(_bfs(g, s))
            seen.update(members)
            out.append(members)
    return out


def brute_cuts(
    g: Graph,
    k: int,
    filter_mode: str = "ivov",
    max_component: int = MAX_ORACLE_COMPONENT,
) -> list[frozenset[int]]:
    """Every nonempty proper subset of every component that passes the filter.

    ``filter_mode`` is ``"ivov"`` (diameter of inner plus outer vertex
    boundary at most ``k``) or ``"iv"`` (a side or its complement has inner
    vertex boundary of diameter at most ``k``).  Sides are returned sorted by
    ``(component order, sorted members)``; the family is complement-closed.
    Components above ``max_component`` vertices are refused; the ceiling
    can be raised to 26 at the cost of a long scan.
    """
    mode = getattr(filter_mode, "value", filter_mode)
    if mode not in ("iv", "ivov"):
        raise ValueError(f"unknown filter mode {filter_mode!r}")
    if max_component > 26:
        raise OracleLimitError("subset scan is limited to 26 vertices")
    result: list[frozenset[int]] = []
    for members in _classes(g):
        m = len(members)
        if m > max_component:
            raise OracleLimitError(f"component of size {m} exceeds {max_component}")
        if m < 2:
            continue
        local = {v: i for i, v in enumerate(members)}
        nbr = [0] * m
        far = [0] * m
        for v in members:
            dist = _bfs(g, v)
            for w in g.adjacency[v]:
                nbr[local[v]] |= 1 << local[w]
            for w in members:
                if dist[w] > k:
                    far[local[v]] |= 1 << local[w]
        full = (1 << m) - 1
        for lo in range(1, full, _CHUNK):
            subsets = np.arange(lo, min(lo + _CHUNK, full), dtype=np.int64)
            comp = full ^ subsets
            iv = np.zeros_like(subsets)
            ov = np.zeros_like(subsets)
            for i in range(m):
                inside = (subsets >> i) & 1
                iv |= (inside & ((comp & nbr[i]) != 0)) << i
                ov |= ((1 - inside) & ((subsets & nbr[i]) != 0)) << i

            def small_diam(bmask):
                ok = np.ones(len(bmask), dtype=bool)
                for i in range(m):
                    ok &= (((bmask >> i) & 1) == 0) | ((bmask & far[i]) == 0)
                return ok

            if mode == "ivov":
                keep = small_diam(iv | ov)
            else:
                keep = small_diam(iv) | small_diam(ov)
            for s in subsets[keep].tolist():
                result.append(frozenset(members[i] for i in range(m) if s >> i & 1))
    order = {v: ci for ci, members in enumerate(_classes(g)) for v in members}
    return sorted(result, key=lambda side: (order[next(iter(side))], tuple(sorted(side))))


def brute_modulus(g: Graph, k: int, filter_mode: str = "ivov", max_component: int = MAX_ORACLE_COMPONENT) -> int:
    """``max min(diam C, diam C̄)`` over :func:`brute_cuts`, with ambient BFS diameters."""
    dist = [_bfs(g, s) for s in range(g.vertex_count)]

    def diam(a):
        return max((dist[u][v] for u in a for v in a), default=0)

    best = 0
    for side in brute_cuts(g, k, filter_mode, max_component):
        universe = set(dist[next(iter(side))])
        best = max(best, min(diam(side), diam(universe - side)))
    return best


def brute_alternating_words(
    n_vertices: int,
    t_edges: Iterable[Sequence[int]],
    h_edges: Iterable[Sequence[int]],
    max_len: int = 8,
) -> tuple[int, ...] | None:
    """Search for ``x_0, ..., x_{2m}`` alternating between distinct
    ``E_T``-related and distinct ``E_H``-related vertices with ``x_0 == x_{2m}``.

    ``max_len`` bounds the number of steps ``2m``.  Returns the first witness
    found, or ``None``.
    """
    if n_vertices > 12 or max_len > 10:
        raise OracleLimitError("word search limited to 12 vertices and length 10")
    t_rel = _relation(n_vertices, t_edges)
    h_rel = _relation(n_vertices, h_edges)
    for start in range(n_vertices):
        word = [start]

        def dfs(step):
            cur = word[-1]
            rel = t_rel if step % 2 == 0 else h_rel
            for nxt in rel[cur]:
                word.append(nxt)
                if step % 2 == 1 and nxt == start:
                    return True
                if step + 1 < max_len and dfs(step + 1):
                    return True
                word.pop()
            return False

        if dfs(0):
            return tuple(word)
    return None


def _relation(n: int, edges) -> list[list[int]]:
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    g = Graph.from_edges(n, [(min(u, v), max(u, v)) for u, v in edges], allow_duplicates=True)
    rel: list[list[int]] = [[] for _ in range(n)]
    for s in range(n):
        rel[s] = sorted(v for v in _bfs(g, s) if v != s)
    return rel


def brute_separation_count(cuts: Iterable, x: int, y: int) -> int:
    """``|{C : x in C, y not in C}|`` by direct scan; accepts cuts or raw sides."""
    total = 0
    for c in cuts:
        side = getattr(c, "side", c)
        if x in side and y not in side:
            total += 1
    return total


def separation_matrix(cuts: Sequence, n: int) -> np.ndarray:
    """All-pairs separation counts via the membership matrix: ``M^T (1 - M)``."""
    m = np.zeros((len(cuts), n), dtype=np.int64)
    for i, c in enumerate(cuts):
        side = getattr(c, "side", c)
        m[i, list(side)] = 1
    return m.T @ (1 - m)


def brute_is_nested(a: frozenset[int], b: frozenset[int], universe: frozenset[int]) -> bool:
    ac, bc = universe - a, universe - b
    return not (a & b) or not (a & bc) or not (ac & b) or not (ac & bc)


def brute_lipschitz(g: Graph, h: Graph, max_l: int = 64) -> int | None:
    """Least ``l`` with mutual power containment by testing ``l = 1, 2, ...``."""
    dg = [_bfs(g, s) for s in range(g.vertex_count)]
    dh = [_bfs(h, s) for s in range(h.vertex_count)]
    for ell in range(1, max_l + 1):
        ok = all(dg[u].get(v, ell + 1) <= ell for u, v in h.edges()) and all(
            dh[u].get(v, ell + 1) <= ell for u, v in g.edges()
        )
        if ok:
            return ell
    return None
