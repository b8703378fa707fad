"""Shared graph builders and strategies for the test suite."""

from __future__ import annotations

import json
import random
from pathlib import Path

from hypothesis import strategies as st

from quasitree.graph import Graph
from quasitree.io import parse_graph

CORPUS_DIR = Path(__file__).parent / "corpus"

P4 = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
TRIANGLE = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
TWO_TRIANGLES = Graph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])
C4 = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)])


def random_connected(rng: random.Random, n: int, maxdeg: int = 4, extra: int | None = None) -> Graph:
    """Random spanning tree with degrees capped at ``maxdeg``, plus a few extra edges."""
    edges: set[tuple[int, int]] = set()
    deg = [0] * n
    order = list(range(n))
    rng.shuffle(order)
    for i in range(1, n):
        v = order[i]
        u = rng.choice([order[j] for j in range(i) if deg[order[j]] < maxdeg])
        edges.add((min(u, v), max(u, v)))
        deg[u] += 1
        deg[v] += 1
    extra = rng.randint(0, n) if extra is None else extra
    for _ in range(extra if n > 1 else 0):
        u, v = rng.sample(range(n), 2)
        e = (min(u, v), max(u, v))
        if e in edges or deg[u] >= maxdeg or deg[v] >= maxdeg:
            continue
        edges.add(e)
        deg[u] += 1
        deg[v] += 1
    return Graph.from_edges(n, sorted(edges))


@st.composite
def connected_graphs(draw, min_n: int = 1, max_n: int = 9, maxdeg: int = 4) -> Graph:
    n = draw(st.integers(min_n, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_connected(random.Random(seed), n, maxdeg)


@st.composite
def graphs(draw, max_n: int = 9) -> Graph:
    """Possibly disconnected graphs of degree at most 4."""
    n = draw(st.integers(0, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=2 * n)) if pairs else []
    deg = [0] * n
    kept = []
    for u, v in sorted(chosen):
        if deg[u] < 4 and deg[v] < 4:
            kept.append((u, v))
            deg[u] += 1
            deg[v] += 1
    return Graph.from_edges(n, kept)


def corpus() -> list[tuple[str, Graph]]:
    out = []
    for path in sorted(CORPUS_DIR.glob("*.json")):
        out.append((path.stem, parse_graph(path.read_text())))
    return out


def corpus_metadata(name: str) -> dict:
    return json.loads((CORPUS_DIR / f"{name}.json").read_text()).get("metadata", {})
