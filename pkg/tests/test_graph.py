from __future__ import annotations

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import C4, P4, connected_graphs, graphs, random_connected
from quasitree.graph import (
    INF,
    Graph,
    GraphError,
    QuasiIsometryError,
    ball,
    bfs_distances,
    components,
    distance_matrix,
    is_acyclic,
    lipschitz_constant,
    metric_diameter,
    power_graph,
    quasi_isometry_constants,
)
from quasitree.oracles import brute_lipschitz

P4_C3 = Graph.from_edges(7, [(0, 1), (1, 2), (2, 3), (4, 5), (5, 6), (4, 6)])


def test_graph_rejects_bad_input():
    with pytest.raises(GraphError):
        Graph.from_edges(2, [(1, 1)])
    with pytest.raises(GraphError):
        Graph.from_edges(2, [(0, 2)])
    with pytest.raises(GraphError):
        Graph.from_edges(2, [(0, 1), (1, 0)])
    assert Graph.from_edges(2, [(0, 1), (1, 0)], allow_duplicates=True).edge_count == 1


def test_components_examples():
    assert len(set(components(P4))) == 1
    assert components(Graph.from_edges(3, [])) == [0, 1, 2]
    sizes = sorted(len(c) for c in P4_C3.component_members)
    assert sizes == [3, 4]


def test_ball_examples():
    assert ball(P4, 0, 0) == {0}
    assert ball(P4, 1, 1) == {0, 1, 2}
    assert ball(C4, 0, 2) == {0, 1, 2, 3}


def test_metric_diameter_examples():
    assert metric_diameter(C4, {1, 3}) == 2
    assert metric_diameter(P4, set()) == 0
    assert metric_diameter(P4_C3, {0, 4}) == INF


def test_power_graph_examples():
    assert power_graph(P4, 1).edges() == P4.edges()
    assert power_graph(P4, 2).edges() == [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]
    assert power_graph(P4, 3).edge_count == 6


def test_is_acyclic_examples():
    assert is_acyclic(P4)
    assert not is_acyclic(Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)]))
    assert is_acyclic(Graph.from_edges(5, [(0, 1), (2, 3), (3, 4)]))


def test_lipschitz_examples_match_oracle():
    path = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    assert lipschitz_constant(C4, C4) == 1
    # frozen from brute_lipschitz
    assert brute_lipschitz(C4, path) == 3
    assert lipschitz_constant(C4, path) == 3
    assert brute_lipschitz(P4, power_graph(P4, 2)) == 2
    assert lipschitz_constant(P4, power_graph(P4, 2)) == 2
    assert lipschitz_constant(P4, Graph.from_edges(4, [(0, 1), (2, 3)])) == INF


def test_quasi_isometry_examples():
    q = quasi_isometry_constants([0, 1, 2, 3], P4, P4)
    assert (q.multiplicative, q.additive, q.codensity) == (1, 0, 0)
    p2 = Graph.from_edges(2, [(0, 1)])
    sub = Graph.from_edges(3, [(0, 2), (1, 2)])
    q = quasi_isometry_constants([0, 1], p2, sub)
    assert (q.multiplicative, q.additive, q.codensity) == (2, 0, 1)
    two = Graph.from_edges(2, [])
    with pytest.raises(QuasiIsometryError):
        quasi_isometry_constants([0, 1], two, p2)


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_adjacency_invariants(g):
    for u, nbrs in enumerate(g.adjacency):
        assert u not in nbrs
        assert len(set(nbrs)) == len(nbrs)
        for v in nbrs:
            assert u in g.adjacency[v]


@settings(max_examples=40, deadline=None)
@given(connected_graphs(max_n=12))
def test_distance_matrix_agrees_with_bfs(g):
    d = distance_matrix(g)
    for s in range(g.vertex_count):
        ref = bfs_distances(g, s)
        for t in range(g.vertex_count):
            assert d[s, t] == ref.get(t, math.inf)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 9), st.integers(0, 2**32), st.integers(0, 2**32))
def test_lipschitz_matches_brute(n, seed_g, seed_h):
    g = random_connected(random.Random(seed_g), n)
    h = random_connected(random.Random(seed_h), n)
    ref = brute_lipschitz(g, h)
    got = lipschitz_constant(g, h)
    assert got == ref
    assert lipschitz_constant(h, g) == got
