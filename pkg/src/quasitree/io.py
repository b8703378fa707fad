"""JSON graph documents and DOT export."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

from .graph import Edge, Graph, GraphError, normalize_edge


class DocumentError(ValueError):
    pass


@dataclass(frozen=True)
class GraphDocument:
    n: int
    edges: tuple[Edge, ...]
    name: str | None = None
    metadata: Mapping[str, Any] = field(default_factory=dict)

    def graph(self) -> Graph:
        return Graph.from_edges(self.n, self.edges)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"n": self.n, "edges": [list(e) for e in self.edges]}
        if self.name is not None:
            out["name"] = self.name
        if self.metadata:
            out["metadata"] = dict(self.metadata)
        return out


def parse_document(text: str) -> GraphDocument:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"malformed JSON: {exc}") from None
    if not isinstance(raw, dict) or "n" not in raw or "edges" not in raw:
        raise DocumentError('a graph document is an object with "n" and "edges"')
    n = raw["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise DocumentError(f"vertex count must be a nonnegative integer, got {n!r}")
    if not isinstance(raw["edges"], list):
        raise DocumentError('"edges" must be a list')
    seen: set[Edge] = set()
    for pair in raw["edges"]:
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or not all(isinstance(v, int) and not isinstance(v, bool) for v in pair)
        ):
            raise DocumentError(f"edge {pair!r} is not a pair of integers")
        u, v = pair
        if u == v:
            raise DocumentError(f"loop at vertex {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise DocumentError(f"edge {pair!r} leaves the range 0..{n - 1}")
        e = normalize_edge(u, v)
        if e in seen:
            raise DocumentError(f"duplicate edge {list(e)}")
        seen.add(e)
    name = raw.get("name")
    if name is not None and not isinstance(name, str):
        raise DocumentError('"name" must be a string')
    metadata = raw.get("metadata", {})
    if not isinstance(metadata, dict):
        raise DocumentError('"metadata" must be an object')
    return GraphDocument(n, tuple(sorted(seen)), name, metadata)


def parse_graph(text: str) -> Graph:
    try:
        return parse_document(text).graph()
    except GraphError as exc:
        raise DocumentError(str(exc)) from None


def emit_document(doc: GraphDocument) -> str:
    return json.dumps(doc.to_json(), sort_keys=True) + "\n"


def emit_graph(g: Graph, name: str | None = None, metadata: Mapping[str, Any] | None = None) -> str:
    return emit_document(GraphDocument(g.vertex_count, tuple(g.edges()), name, metadata or {}))


_STYLE = {
    "T": 'color="firebrick", penwidth=2',
    "H": 'color="steelblue"',
}


def emit_dot(
    g: Graph,
    t_edges: Iterable[Sequence[int]] | None = None,
    h_edges: Iterable[Sequence[int]] | None = None,
    rho: Sequence[int] | None = None,
    name: str = "G",
) -> str:
    """DOT text for ``g``; ``T``/``H`` edges get their own styles and, given
    ``rho``, each node is labelled with its structure-tree vertex.

    When classes are given they must partition the edges of ``g``.
    """
    lines = [f"graph {name} {{"]
    if g.vertex_count == 0:
        return lines[0] + "\n}\n"
    classes: dict[Edge, str] = {}
    if t_edges is not None or h_edges is not None:
        for label, es in (("T", t_edges or ()), ("H", h_edges or ())):
            for u, v in es:
                e = normalize_edge(u, v)
                if e in classes:
                    raise DocumentError(f"edge {list(e)} is in both classes")
                classes[e] = label
        if set(classes) != set(g.edges()):
            raise DocumentError("edge classes do not partition the graph's edges")
    lines.append("  node [shape=circle];")
    for x in range(g.vertex_count):
        if rho is None:
            lines.append(f"  {x};")
        else:
            lines.append(f'  {x} [label="{x}\\nrho={rho[x]}"];')
    for u, v in g.edges():
        cls = classes.get((u, v))
        attrs = f' [class="{cls}", {_STYLE[cls]}]' if cls else ""
        lines.append(f"  {u} -- {v}{attrs};")
    lines.append("}")
    return "\n".join(lines) + "\n"
