from __future__ import annotations

from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import P4, TRIANGLE, connected_graphs
from quasitree.cuts import as_treeset, enumerate_cuts, partition_into_treesets
from quasitree.oracles import brute_separation_count, separation_matrix
from quasitree.structure_tree import build_structure_tree, rho, tree_distance, validate_structure_tree


def orientation_sides(st_, u):
    return {c.side for c in st_.orientation(u)}


def fs(*sets):
    return {frozenset(s) for s in sets}


def test_path_structure_tree():
    ts = as_treeset(P4, enumerate_cuts(P4, 1))
    st_ = build_structure_tree(P4, ts)
    assert len(st_.vertices) == 4 and len(st_.edges) == 3
    assert sorted(set(st_.rho_map)) == list(range(4))
    assert orientation_sides(st_, rho(st_, 0)) == fs({0}, {0, 1}, {0, 1, 2})
    assert tree_distance(st_, rho(st_, 0), rho(st_, 3)) == 3 == brute_separation_count(ts.cuts, 0, 3)
    assert tree_distance(st_, rho(st_, 2), rho(st_, 2)) == 0
    assert validate_structure_tree(st_, P4, ts).ok


def test_triangle_star():
    ts = as_treeset(TRIANGLE, enumerate_cuts(TRIANGLE, 1))
    assert len(ts) == 6
    st_ = build_structure_tree(TRIANGLE, ts)
    assert len(st_.vertices) == 4 and len(st_.edges) == 3
    degrees = sorted(len(a) for a in st_.neighbors())
    assert degrees == [1, 1, 1, 3]
    center = next(u for u, a in enumerate(st_.neighbors()) if len(a) == 3)
    assert center not in st_.rho_map
    assert orientation_sides(st_, center) == fs({1, 2}, {0, 2}, {0, 1})
    assert orientation_sides(st_, rho(st_, 1)) == fs({1}, {0, 1}, {1, 2})
    assert tree_distance(st_, rho(st_, 0), rho(st_, 1)) == 2 == brute_separation_count(ts.cuts, 0, 1)
    report = validate_structure_tree(st_, TRIANGLE, ts)
    assert report.ok, report.failures


def test_empty_treeset_gives_one_vertex():
    ts = as_treeset(P4, [])
    st_ = build_structure_tree(P4, ts)
    assert len(st_.vertices) == 1 and st_.edges == ()
    assert set(st_.rho_map) == {0}


def test_corrupted_tree_is_rejected():
    ts = as_treeset(P4, enumerate_cuts(P4, 1))
    st_ = build_structure_tree(P4, ts)
    report = validate_structure_tree(st_.without_edge(0), P4, ts)
    assert not report.ok
    assert any("not a tree" in f for f in report.failures)


@settings(max_examples=40, deadline=None)
@given(connected_graphs(max_n=16), st.integers(0, 2))
def test_distance_identity(g, k):
    for ts in partition_into_treesets(g, enumerate_cuts(g, k)):
        st_ = build_structure_tree(g, ts)
        report = validate_structure_tree(st_, g, ts)
        assert report.ok, report.failures
        sep = separation_matrix(ts.cuts, g.vertex_count)
        for x in range(g.vertex_count):
            for y in range(g.vertex_count):
                assert tree_distance(st_, st_.rho_map[x], st_.rho_map[y]) == sep[x, y]
