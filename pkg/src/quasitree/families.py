"""Deterministic graph families.

Randomized families draw from ``random.Random(seed)`` only, so a given
``(name, params, seed)`` always yields the same graph.

* ``tree_of_triangles(m, seed)``: node ``i`` becomes triangle
  ``3i, 3i+1, 3i+2``.  Nodes ``1..m-1`` pick a parent uniformly among
  earlier nodes with fewer than two children.  A parent's first child hangs
  off its corner 2 and its second off corner 1, always to the child's
  corner 0, so the maximum degree is 3.
* ``tree_with_chords(n, seed)``: a random tree of maximum degree 3 built
  the same way, plus a chord from roughly every fourth vertex to its
  grandparent when both endpoints still have degree below 4.
* ``free_product_ball(radius)``: ball in the Cayley graph of
  ``Z/2 * Z/3 = <a | a^2> * <b | b^3>`` for generators ``a, b, b^-1``;
  vertices are reduced words numbered in BFS order, trying ``a``, ``b``,
  ``b^-1`` in that order.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass

from .graph import Graph

DEFAULT_SEED = 0


class FamilyError(ValueError):
    pass


@dataclass(frozen=True)
class FamilySpec:
    name: str
    params: tuple[int, ...]
    seed: int = DEFAULT_SEED

    @classmethod
    def parse(cls, text: str, seed: int = DEFAULT_SEED) -> "FamilySpec":
        """``"grid:4x4"`` or ``"path:10"``."""
        name, _, rest = text.partition(":")
        name = name.strip().replace("-", "_")
        if name not in GENERATORS:
            raise FamilyError(f"unknown family {name!r}")
        try:
            params = tuple(int(p) for p in rest.lower().split("x")) if rest else ()
        except ValueError:
            raise FamilyError(f"bad size parameters {rest!r}") from None
        return cls(name, params, seed)

    @property
    def size(self) -> str:
        return "x".join(map(str, self.params))

    def __str__(self) -> str:
        return f"{self.name}:{self.size}"


def _need(cond: bool, msg: str) -> None:
    if not cond:
        raise FamilyError(msg)


def path(n: int) -> Graph:
    _need(n >= 1, "path needs n >= 1")
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Graph:
    _need(n >= 3, "cycle needs n >= 3")
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)] + [(0, n - 1)])


def grid(a: int, b: int | None = None) -> Graph:
    b = a if b is None else b
    _need(a >= 1 and b >= 1, "grid needs positive sides")
    edges = []
    for i in range(a):
        for j in range(b):
            v = i * b + j
            if j + 1 < b:
                edges.append((v, v + 1))
            if i + 1 < a:
                edges.append((v, v + b))
    return Graph.from_edges(a * b, edges)


def ladder(n: int, m: int | None = None) -> Graph:
    """``2 x n`` ladder; accepts ``ladder:n`` or ``ladder:2xn``."""
    if m is not None:
        _need(n == 2, "ladder is 2 x n")
        n = m
    return grid(2, n)


def complete(n: int) -> Graph:
    _need(n >= 1, "complete graph needs n >= 1")
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def balanced_tree(branching: int, depth: int) -> Graph:
    _need(branching >= 1 and depth >= 0, "balanced tree needs branching >= 1, depth >= 0")
    edges, frontier, n = [], [0], 1
    for _ in range(depth):
        nxt = []
        for u in frontier:
            for _ in range(branching):
                edges.append((u, n))
                nxt.append(n)
                n += 1
        frontier = nxt
    return Graph.from_edges(n, edges)


def subdivided_tree(branching: int, depth: int, s: int = 1) -> Graph:
    """Balanced tree with ``s`` extra vertices on every edge."""
    _need(s >= 0, "subdivision count must be >= 0")
    base = balanced_tree(branching, depth)
    n = base.vertex_count
    edges = []
    for u, v in base.edges():
        chain = [u, *range(n, n + s), v]
        n += s
        edges.extend(zip(chain, chain[1:]))
    return Graph.from_edges(n, edges)


def _random_tree_parents(m: int, rng: random.Random, max_children: int) -> list[tuple[int, int]]:
    """``(parent, child rank)`` for nodes ``1..m-1``."""
    children = [0] * m
    out = []
    for v in range(1, m):
        open_nodes = [u for u in range(v) if children[u] < max_children]
        p = rng.choice(open_nodes)
        out.append((p, children[p]))
        children[p] += 1
    return out


def tree_of_triangles(m: int, seed: int = DEFAULT_SEED) -> Graph:
    _need(m >= 1, "tree_of_triangles needs m >= 1")
    rng = random.Random(seed)
    edges = []
    for i in range(m):
        a = 3 * i
        edges += [(a, a + 1), (a + 1, a + 2), (a, a + 2)]
    for child, (parent, rank) in enumerate(_random_tree_parents(m, rng, 2), start=1):
        corner = 2 if rank == 0 else 1
        edges.append((3 * parent + corner, 3 * child))
    return Graph.from_edges(3 * m, edges)


def tree_with_chords(n: int, seed: int = DEFAULT_SEED) -> Graph:
    _need(n >= 1, "tree_with_chords needs n >= 1")
    rng = random.Random(seed)
    parent = [-1] * n
    edges = set()
    for child, (p, _) in enumerate(_random_tree_parents(n, rng, 2), start=1):
        parent[child] = p
        edges.add((p, child))
    degree = [0] * n
    for u, v in edges:
        degree[u] += 1
        degree[v] += 1
    for v in range(n):
        if rng.random() >= 0.25 or parent[v] < 0 or parent[parent[v]] < 0:
            continue
        w = parent[parent[v]]
        if degree[v] < 4 and degree[w] < 4:
            edges.add((w, v))
            degree[v] += 1
            degree[w] += 1
    return Graph.from_edges(n, sorted(edges))


def _times(word: tuple[str, ...], gen: str) -> tuple[str, ...]:
    last = word[-1] if word else None
    if gen == "a":
        return word[:-1] if last == "a" else word + ("a",)
    inverse = "B" if gen == "b" else "b"
    if last == gen:
        return word[:-1] + (inverse,)
    if last == inverse:
        return word[:-1]
    return word + (gen,)


def free_product_ball(radius: int) -> Graph:
    _need(radius >= 0, "radius must be >= 0")
    ids = {(): 0}
    queue = deque([((), 0)])
    edges = set()
    while queue:
        w, d = queue.popleft()
        for gen in ("a", "b", "B"):
            nxt = _times(w, gen)
            if nxt not in ids:
                if d == radius:
                    continue
                ids[nxt] = len(ids)
                queue.append((nxt, d + 1))
            u, v = ids[w], ids[nxt]
            edges.add((min(u, v), max(u, v)))
    return Graph.from_edges(len(ids), sorted(edges))


GENERATORS = {
    "path": path,
    "cycle": cycle,
    "grid": grid,
    "ladder": ladder,
    "complete": complete,
    "balanced_tree": balanced_tree,
    "subdivided_tree": subdivided_tree,
    "tree_of_triangles": tree_of_triangles,
    "tree_with_chords": tree_with_chords,
    "free_product_ball": free_product_ball,
}
SEEDED = {"tree_of_triangles", "tree_with_chords"}


def generate(spec: FamilySpec | str, seed: int | None = None) -> Graph:
    if isinstance(spec, str):
        spec = FamilySpec.parse(spec, DEFAULT_SEED if seed is None else seed)
    elif seed is not None:
        spec = FamilySpec(spec.name, spec.params, seed)
    fn = GENERATORS.get(spec.name)
    if fn is None:
        raise FamilyError(f"unknown family {spec.name!r}")
    args = spec.params + ((spec.seed,) if spec.name in SEEDED else ())
    try:
        return fn(*args)
    except TypeError as exc:
        raise FamilyError(f"bad parameters for {spec.name}: {spec.params}") from exc
