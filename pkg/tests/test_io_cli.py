from __future__ import annotations

import json

import pytest
from hypothesis import given, settings

from helpers import CORPUS_DIR, P4, TWO_TRIANGLES, corpus, graphs
from quasitree.cli import BENCH_HEADER, main
from quasitree.cuts import as_treeset, cut_from_side
from quasitree.decompose import split
from quasitree.families import FamilyError, FamilySpec, free_product_ball, generate, tree_of_triangles
from quasitree.graph import Graph, edges_acyclic
from quasitree.io import DocumentError, emit_dot, emit_graph, parse_document, parse_graph

# -- documents ---------------------------------------------------------------


def test_parse_path():
    assert parse_graph('{"n":4,"edges":[[0,1],[1,2],[2,3]]}') == P4


def test_emit_normalizes():
    doc = '{"edges": [[2, 1], [0, 1]], "n": 3, "name": "p"}'
    out = emit_graph(parse_graph(doc), name="p")
    assert json.loads(out) == {"n": 3, "edges": [[0, 1], [1, 2]], "name": "p"}
    assert emit_graph(parse_graph(out), name="p") == out


@pytest.mark.parametrize(
    "text",
    [
        '{"n":2,"edges":[[1,1]]}',
        '{"n":2,"edges":[[0,2]]}',
        '{"n":3,"edges":[[0,1],[1,0]]}',
        '{"n":2,"edges":[[0]]}',
        '{"n":-1,"edges":[]}',
        '{"edges":[]}',
        "not json",
        '{"n":2,"edges":[[0,1]],"metadata":3}',
    ],
)
def test_parse_rejects(text):
    with pytest.raises(DocumentError):
        parse_graph(text)


@settings(max_examples=50, deadline=None)
@given(graphs())
def test_round_trip(g):
    assert parse_graph(emit_graph(g)) == g


def test_corpus_round_trip():
    for path in sorted(CORPUS_DIR.glob("*.json")):
        text = path.read_text()
        doc = parse_document(text)
        assert emit_graph(doc.graph(), doc.name, doc.metadata) == text, path.name


# -- DOT ---------------------------------------------------------------------


def test_dot_plain_path():
    text = emit_dot(P4)
    assert text.startswith("graph G {")
    assert text.count(" -- ") == 3
    assert sum(1 for line in text.splitlines() if line.strip().rstrip(";").isdigit()) == 4


def test_dot_empty_graph():
    assert emit_dot(Graph.from_edges(0, [])) == "graph G {\n}\n"


def test_dot_split_snapshot():
    ts = as_treeset(TWO_TRIANGLES, [cut_from_side(TWO_TRIANGLES, s) for s in ({0, 1, 2}, {3, 4, 5})])
    dec = split(TWO_TRIANGLES, ts)
    text = emit_dot(dec.host, dec.t_edges, dec.h_edges, rho=dec.structure_tree.rho_map)
    expected = (
        "graph G {\n"
        "  node [shape=circle];\n"
        '  0 [label="0\\nrho=0"];\n'
        '  1 [label="1\\nrho=0"];\n'
        '  2 [label="2\\nrho=0"];\n'
        '  3 [label="3\\nrho=1"];\n'
        '  4 [label="4\\nrho=1"];\n'
        '  5 [label="5\\nrho=1"];\n'
        '  0 -- 1 [class="H", color="steelblue"];\n'
        '  0 -- 2 [class="H", color="steelblue"];\n'
        '  1 -- 2 [class="H", color="steelblue"];\n'
        '  2 -- 3 [class="T", color="firebrick", penwidth=2];\n'
        '  3 -- 4 [class="H", color="steelblue"];\n'
        '  3 -- 5 [class="H", color="steelblue"];\n'
        '  4 -- 5 [class="H", color="steelblue"];\n'
        "}\n"
    )
    assert text == expected


def test_dot_rejects_overlapping_classes():
    with pytest.raises(DocumentError):
        emit_dot(P4, [(0, 1)], [(0, 1), (1, 2), (2, 3)])
    with pytest.raises(DocumentError):
        emit_dot(P4, [(0, 1)], [(1, 2)])


# -- families ----------------------------------------------------------------


def test_family_examples():
    assert generate("path:4") == P4
    g = generate("grid:3x3")
    assert (g.vertex_count, g.edge_count) == (9, 12)
    assert tree_of_triangles(2, seed=123) == TWO_TRIANGLES
    assert generate("ladder:2x5") == generate("ladder:5")
    assert generate("complete:4").edge_count == 6
    assert generate("balanced_tree:2x3").vertex_count == 15
    assert generate("subdivided_tree:2x1x2").vertex_count == 7


def test_seeded_families_are_deterministic():
    for name in ("tree_of_triangles:12", "tree_with_chords:20"):
        assert generate(name, seed=7) == generate(name, seed=7)
    assert generate("tree_of_triangles:12", seed=1) != generate("tree_of_triangles:12", seed=2)
    for m in (2, 5, 20):
        g = tree_of_triangles(m, seed=m)
        assert g.max_degree <= 3 and g.edge_count == 4 * m - 1


def test_free_product_ball():
    g = free_product_ball(3)
    assert g.vertex_count == 14 and g.max_degree == 3
    assert free_product_ball(0).vertex_count == 1
    # every b-edge lies on a triangle, a-edges are bridges
    assert not edges_acyclic(g.vertex_count, g.edges())


def test_family_errors():
    with pytest.raises(FamilyError):
        FamilySpec.parse("moebius:3")
    with pytest.raises(FamilyError):
        generate("grid:axb")
    with pytest.raises(FamilyError):
        generate("cycle:2")
    with pytest.raises(FamilyError):
        generate("path:3x4x5")


# -- CLI ---------------------------------------------------------------------


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_cli_treeify_path(capsys):
    code, out, _ = run(capsys, "treeify", "--family", "path:4", "-k", "1")
    data = json.loads(out)
    assert code == 0 and data["acyclic"] is True and data["lipschitz"] == 1


def test_cli_modulus_ladder(capsys):
    code, out, _ = run(capsys, "modulus", "--family", "ladder:2x20", "-k", "2")
    assert code == 0 and json.loads(out)["r"] >= 8


def test_cli_modulus_profile(capsys):
    code, out, _ = run(capsys, "modulus", "--family", "path:9", "-k", "2", "--profile")
    rs = [row["r"] for row in json.loads(out)["profile"]]
    assert code == 0 and rs == sorted(rs) and len(rs) == 3


def test_cli_verify_cycle(capsys):
    code, out, _ = run(capsys, "verify", "--family", "cycle:4", "-k", "2")
    assert code == 0 and json.loads(out)["ok"] is True


def test_cli_reads_files_and_writes_dot(tmp_path, capsys):
    src = tmp_path / "g.json"
    src.write_text(emit_graph(TWO_TRIANGLES))
    dot = tmp_path / "g.dot"
    code, out, _ = run(capsys, "decompose", str(src), "-k", "2", "--dot", str(dot))
    assert code == 0 and json.loads(out)["ok"] is True
    assert dot.read_text().startswith("graph G {")
    for cmd in ("cuts", "treesets", "structure-tree"):
        code, out, _ = run(capsys, cmd, str(src), "-k", "2")
        assert code == 0, cmd
        json.loads(out)


def test_cli_gen_round_trips(capsys):
    code, out, _ = run(capsys, "gen", "--family", "tree_of_triangles:3", "--seed", "4")
    doc = parse_document(out)
    assert code == 0 and doc.graph() == tree_of_triangles(3, 4) and doc.metadata == {"seed": 4}


def test_cli_error_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n":2,"edges":[[1,1]]}')
    assert run(capsys, "cuts", str(bad))[0] == 2
    assert run(capsys, "cuts")[0] == 2
    assert run(capsys, "cuts", "--family", "nope:3")[0] == 2
    assert run(capsys, "cuts", "--family", "grid:6x6", "-k", "2", "--max-cuts", "5")[0] == 2
    assert run(capsys, "verify", "--family", "path:20", "-k", "1")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2


def test_cli_structure_tree_violation_exit(monkeypatch, capsys):
    import quasitree.cli as cli
    from quasitree.structure_tree import StructureTreeReport

    monkeypatch.setattr(cli, "validate_structure_tree", lambda *a: StructureTreeReport(["forced"]))
    assert run(capsys, "structure-tree", "--family", "path:4")[0] == 1


def test_cli_bench_columns(capsys):
    code, out, _ = run(capsys, "bench", "--families", "path:6,grid:3x3", "--no-timing")
    rows = [line.split(",") for line in out.splitlines()]
    assert code == 0
    assert rows[0] == BENCH_HEADER and len(rows) == 3
    assert rows[1][:4] == ["path", "6", "2", "ivov"] and rows[1][-1] == ""
    code, out, _ = run(capsys, "bench", "--families", "path:6")
    assert float(out.splitlines()[1].split(",")[-1]) >= 0


def test_cli_corpus_verify_small(capsys):
    for name, g in corpus():
        if g.vertex_count > 12:
            continue
        code, out, _ = run(capsys, "verify", str(CORPUS_DIR / f"{name}.json"), "-k", "1")
        assert code == 0, (name, out)
