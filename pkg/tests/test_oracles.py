from __future__ import annotations

import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import C4, P4, TRIANGLE, random_connected
from quasitree.cuts import enumerate_cuts
from quasitree.decompose import free_intersection_check
from quasitree.families import ladder, path
from quasitree.graph import Graph
from quasitree.oracles import (
    OracleLimitError,
    brute_alternating_words,
    brute_cuts,
    brute_modulus,
    brute_separation_count,
    separation_matrix,
)


def test_brute_cuts_examples():
    assert len(brute_cuts(P4, 1)) == 6
    assert brute_cuts(C4, 1) == []
    got = brute_cuts(C4, 2)
    assert len(got) == 14
    assert len(set(got)) == 14
    universe = frozenset(range(4))
    assert {universe - s for s in got} == set(got)


def test_brute_cuts_definition_by_hand():
    # direct re-check of the filter on every subset of a small graph
    g = random_connected(random.Random(11), 7)
    dist = {(u, v): _bfs_len(g, u, v) for u in range(7) for v in range(7)}
    expected = set()
    for r in range(1, 7):
        for side in itertools.combinations(range(7), r):
            s = set(side)
            iv = {x for x in s if any(y not in s for y in g.adjacency[x])}
            ov = {y for y in range(7) if y not in s and any(x in s for x in g.adjacency[y])}
            b = iv | ov
            if all(dist[u, v] <= 1 for u in b for v in b):
                expected.add(frozenset(s))
    assert set(brute_cuts(g, 1)) == expected


def _bfs_len(g, u, v):
    frontier, seen, d = {u}, {u}, 0
    while v not in frontier:
        frontier = {w for x in frontier for w in g.adjacency[x]} - seen
        seen |= frontier
        d += 1
    return d


def test_brute_cuts_limits():
    with pytest.raises(OracleLimitError):
        brute_cuts(path(19), 1)
    with pytest.raises(OracleLimitError):
        brute_cuts(path(4), 1, max_component=30)


def test_word_search_examples():
    assert brute_alternating_words(2, [(0, 1)], [(0, 1)]) == (0, 1, 0)
    assert brute_alternating_words(3, [(0, 1)], [(1, 2)]) is None
    with pytest.raises(OracleLimitError):
        brute_alternating_words(13, [], [])


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 10), st.data())
def test_free_intersection_matches_word_search(n, data):
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    if not pairs:
        return
    t = data.draw(st.lists(st.sampled_from(pairs), unique=True, max_size=n))
    h = data.draw(st.lists(st.sampled_from(pairs), unique=True, max_size=n))
    witness = brute_alternating_words(n, t, h, max_len=10)
    assert free_intersection_check(n, t, h) == (witness is None)


def test_separation_count_examples():
    fam = enumerate_cuts(P4, 1)
    assert brute_separation_count(fam, 0, 3) == 3
    assert brute_separation_count(fam, 2, 2) == 0
    tri = enumerate_cuts(TRIANGLE, 1)
    assert brute_separation_count(tri, 0, 1) == 2
    m = separation_matrix(fam, 4)
    assert m.shape == (4, 4) and np.all(np.diag(m) == 0) and m[0, 3] == 3


def test_brute_modulus_values():
    # frozen oracle values; the fast path is compared in the decompose tests
    assert brute_modulus(path(5), 1) == 1
    assert brute_modulus(path(9), 1) == 3
    assert brute_modulus(C4, 1) == 0
    assert brute_modulus(ladder(8), 2) == 4
    assert brute_modulus(Graph.from_edges(1, []), 1) == 0
