"""Command line entry point: ``quasitree <subcommand> [graph.json | --family NAME:AxB]``.

Exit codes: 0 success, 1 violated certificate or failed check, 2 cap,
parse or usage error.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Sequence

from .cuts import CapExceeded, Caps, FilterMode, as_treeset, enumerate_cuts, partition_into_treesets
from .decompose import (
    CertificateError,
    ContractError,
    DecompositionError,
    accessibility_pipeline,
    free_intersection_check,
    one_endedness_modulus,
    treeify,
)
from .families import FamilyError, FamilySpec, generate
from .graph import Graph
from .io import DocumentError, emit_dot, emit_graph, parse_graph
from .oracles import (
    OracleLimitError,
    brute_alternating_words,
    brute_cuts,
    brute_separation_count,
)
from .structure_tree import build_structure_tree, tree_distance, validate_structure_tree

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2

DEFAULT_SWEEP = (
    "path:8",
    "path:16",
    "cycle:12",
    "ladder:8",
    "ladder:12",
    "ladder:16",
    "ladder:20",
    "grid:4x4",
    "grid:8x8",
    "tree_of_triangles:2",
    "tree_of_triangles:5",
    "tree_of_triangles:10",
    "tree_of_triangles:20",
    "free_product_ball:4",
)
BENCH_HEADER = ["family", "size", "k", "filter", "modulus", "treeify_lipschitz", "stages", "cuts", "runtime_ms"]


class UsageError(ValueError):
    pass


def _num(x: float) -> Any:
    if isinstance(x, float):
        if math.isinf(x):
            return "inf"
        if x.is_integer():
            return int(x)
    return x


def _dump(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _sides(cuts) -> list[list[int]]:
    return [sorted(c.side) for c in cuts]


def _certificate_json(cert) -> list[dict[str, Any]]:
    return [{"check": n, "passed": p, "detail": d} for n, p, d in cert.checks]


# --------------------------------------------------------------------------
# input handling


def _caps(args) -> Caps:
    return Caps(max_ball=args.max_ball, max_components=args.max_components, max_cuts=args.max_cuts)


def _load(args) -> tuple[Graph, str]:
    if args.family and args.graph:
        raise UsageError("give either a graph file or --family, not both")
    if args.family:
        spec = FamilySpec.parse(args.family, args.seed)
        return generate(spec), str(spec)
    if not args.graph:
        raise UsageError("no input graph: pass a file, '-' for stdin, or --family")
    if args.graph == "-":
        return parse_graph(sys.stdin.read()), "stdin"
    try:
        with open(args.graph, encoding="utf-8") as fh:
            return parse_graph(fh.read()), args.graph
    except OSError as exc:
        raise UsageError(str(exc)) from None


def _write_dot(args, text: str) -> None:
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(text)


# --------------------------------------------------------------------------
# subcommands


def cmd_gen(args, out) -> int:
    spec = FamilySpec.parse(args.family, args.seed) if args.family else None
    if spec is None:
        raise UsageError("gen needs --family")
    g = generate(spec)
    meta = {"seed": spec.seed} if spec.name in ("tree_of_triangles", "tree_with_chords") else {}
    out.write(emit_graph(g, name=str(spec), metadata=meta))
    _write_dot(args, emit_dot(g))
    return EXIT_OK


def cmd_cuts(args, out) -> int:
    g, name = _load(args)
    cuts = enumerate_cuts(g, args.k, _caps(args), FilterMode(args.filter))
    out.write(
        _dump(
            {
                "graph": name,
                "k": args.k,
                "filter": args.filter,
                "count": len(cuts),
                "cuts": [
                    {"side": sorted(c.side), "component": c.component, "inner_boundary": sorted(c.inner_boundary)}
                    for c in cuts
                ],
            }
        )
    )
    return EXIT_OK


def cmd_treesets(args, out) -> int:
    g, name = _load(args)
    cuts = enumerate_cuts(g, args.k, _caps(args), FilterMode(args.filter))
    parts = partition_into_treesets(g, cuts)
    out.write(
        _dump(
            {
                "graph": name,
                "k": args.k,
                "filter": args.filter,
                "cuts": len(cuts),
                "treesets": [{"size": len(t), "sides": _sides(t.cuts)} for t in parts],
            }
        )
    )
    return EXIT_OK


def cmd_structure_tree(args, out) -> int:
    g, name = _load(args)
    cuts = enumerate_cuts(g, args.k, _caps(args), FilterMode(args.filter))
    parts = partition_into_treesets(g, cuts)
    chosen = range(len(parts)) if args.treeset is None else [args.treeset]
    result, ok = [], True
    for i in chosen:
        if not 0 <= i < len(parts):
            raise UsageError(f"treeset index {i} out of range 0..{len(parts) - 1}")
        ts = parts[i]
        st = build_structure_tree(g, ts)
        report = validate_structure_tree(st, g, ts)
        ok &= report.ok
        result.append(
            {
                "treeset": i,
                "sides": _sides(ts.cuts),
                "vertices": [
                    {"component": comp, "orientation": [j for j in range(len(ts)) if mask >> j & 1]}
                    for comp, mask in st.vertices
                ],
                "edges": [list(e) for e in st.edges],
                "rho": list(st.rho_map),
                "valid": report.ok,
                "failures": report.failures,
            }
        )
    if not parts:
        # no cuts: one tree vertex per component
        st = build_structure_tree(g, as_treeset(g, []))
        result.append(
            {
                "treeset": None,
                "sides": [],
                "vertices": [{"component": c, "orientation": []} for c, _ in st.vertices],
                "edges": [],
                "rho": list(st.rho_map),
                "valid": True,
                "failures": [],
            }
        )
    out.write(_dump({"graph": name, "k": args.k, "filter": args.filter, "structure_trees": result}))
    first = result[0]
    _write_dot(args, emit_dot(g, rho=first["rho"]))
    return EXIT_OK if ok else EXIT_VIOLATION


def _stage_json(stage) -> dict[str, Any]:
    dec = stage.decomposition
    qi = stage.qi
    return {
        "index": stage.index,
        "cuts": stage.cut_count,
        "vertices": stage.graph.vertex_count,
        "inserted": sum(len(v) for v in stage.subdivision.inserted.values()),
        "r": dec.r,
        "measured_lipschitz": _num(dec.measured_lipschitz),
        "split_t_edges": [list(e) for e in dec.t_edges],
        "h_edge_count": len(stage.h_edges),
        "qi": None if qi is None else {"multiplicative": qi.multiplicative, "additive": qi.additive},
        "certificate": _certificate_json(stage.certificate),
    }


def cmd_decompose(args, out) -> int:
    g, name = _load(args)
    pipe = accessibility_pipeline(
        g, args.k, _caps(args), FilterMode(args.filter), strict=False, reenumerate=args.reenumerate
    )
    out.write(
        _dump(
            {
                "graph": name,
                "k": args.k,
                "filter": args.filter,
                "cuts": pipe.initial_cut_count,
                "treeset_sizes": list(pipe.treeset_sizes),
                "stages": [_stage_json(s) for s in pipe.stages],
                "vertices": pipe.graph.vertex_count,
                "t_edges": [list(e) for e in pipe.t_edges],
                "h_edges": [list(e) for e in pipe.h_edges],
                "collapse": list(pipe.collapse),
                "ok": pipe.certificate.ok,
            }
        )
    )
    _write_dot(args, emit_dot(pipe.graph, pipe.t_edges, pipe.h_edges))
    return EXIT_OK if pipe.certificate.ok else EXIT_VIOLATION


def cmd_treeify(args, out) -> int:
    g, name = _load(args)
    res = treeify(g, args.k, _caps(args), FilterMode(args.filter), strict=False, reenumerate=args.reenumerate)
    out.write(
        _dump(
            {
                "graph": name,
                "k": args.k,
                "filter": args.filter,
                "tree_edges": [list(e) for e in res.tree.edges()],
                "acyclic": res.tree.edge_count == g.vertex_count - len(res.tree.component_members),
                "lipschitz": _num(res.lipschitz),
                "stages": res.stage_count,
                "cuts": res.pipeline.initial_cut_count,
                "certificate": _certificate_json(res.certificate),
                "ok": res.certificate.ok,
            }
        )
    )
    _write_dot(args, emit_dot(res.tree))
    return EXIT_OK if res.certificate.ok else EXIT_VIOLATION


def cmd_modulus(args, out) -> int:
    g, name = _load(args)
    ks = range(args.k + 1) if args.profile else [args.k]
    rows = []
    for k in ks:
        e = one_endedness_modulus(g, k, FilterMode(args.filter), _caps(args))
        rows.append(
            {"k": k, "r": e.r, "cuts": e.cut_count, "witness": None if e.witness is None else sorted(e.witness.side)}
        )
    payload: dict[str, Any] = {"graph": name, "filter": args.filter}
    if args.profile:
        payload["profile"] = rows
    else:
        payload.update(rows[0])
    out.write(_dump(payload))
    return EXIT_OK


def cmd_verify(args, out) -> int:
    """Compare fast paths with the oracles on one graph."""
    g, name = _load(args)
    mode = FilterMode(args.filter)
    checks: list[dict[str, Any]] = []

    def check(label: str, passed: bool, detail: str = "") -> None:
        checks.append({"check": label, "passed": bool(passed), "detail": detail})

    fast = enumerate_cuts(g, args.k, _caps(args), mode)
    slow = brute_cuts(g, args.k, mode.value)
    check("enumerate_cuts matches brute_cuts", {c.side for c in fast} == set(slow), f"{len(fast)} vs {len(slow)}")
    for i, ts in enumerate(partition_into_treesets(g, fast)):
        st = build_structure_tree(g, ts)
        bad = 0
        for x in range(g.vertex_count):
            for y in range(g.vertex_count):
                if g.component_ids[x] != g.component_ids[y]:
                    continue
                d = tree_distance(st, st.rho_map[x], st.rho_map[y])
                bad += d != brute_separation_count(ts.cuts, x, y)
        check(f"treeset {i}: tree distance equals separation count", bad == 0, f"{bad} mismatched pairs")
    pipe = accessibility_pipeline(g, args.k, _caps(args), mode, strict=False)
    check("pipeline certificate", pipe.certificate.ok, "; ".join(pipe.certificate.failures()))
    for stage in pipe.stages:
        y = stage.graph.vertex_count
        dec = stage.decomposition
        fast_free = free_intersection_check(y, dec.t_edges, dec.h_edges)
        if y <= 12:
            word = brute_alternating_words(y, dec.t_edges, dec.h_edges, max_len=8)
            check(f"stage {stage.index}: free intersection agrees with word search", fast_free == (word is None))
        else:
            check(f"stage {stage.index}: free intersection", fast_free, "word search skipped above 12 vertices")
    ok = all(c["passed"] for c in checks)
    out.write(_dump({"graph": name, "k": args.k, "filter": args.filter, "checks": checks, "ok": ok}))
    return EXIT_OK if ok else EXIT_VIOLATION


def bench_row(family: str, k: int, filter_mode: str, seed: int, caps: Caps, timing: bool) -> list[str]:
    spec = FamilySpec.parse(family, seed)
    g = generate(spec)
    start = time.perf_counter()
    mode = FilterMode(filter_mode)
    try:
        modulus = str(one_endedness_modulus(g, k, mode, caps).r)
        res = treeify(g, k, caps, mode, strict=False)
        lip = str(_num(res.lipschitz)) if res.certificate.ok else "violation"
        stages, cuts = str(res.stage_count), str(res.pipeline.initial_cut_count)
    except CapExceeded:
        modulus = lip = stages = cuts = "cap"
    elapsed = f"{(time.perf_counter() - start) * 1000:.1f}" if timing else ""
    return [spec.name, spec.size, str(k), filter_mode, modulus, lip, stages, cuts, elapsed]


def cmd_bench(args, out) -> int:
    families = [f.strip() for f in args.families.split(",") if f.strip()] if args.families else list(DEFAULT_SWEEP)
    for f in families:
        FamilySpec.parse(f)
    caps = _caps(args)
    jobs = [(f, args.k, args.filter, args.seed, caps, not args.no_timing) for f in families]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(bench_row, *zip(*jobs)))
    else:
        rows = [bench_row(*j) for j in jobs]
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(BENCH_HEADER)
    writer.writerows(rows)
    out.write(buf.getvalue())
    return EXIT_VIOLATION if any(r[5] == "violation" for r in rows) else EXIT_OK


COMMANDS = {
    "gen": cmd_gen,
    "cuts": cmd_cuts,
    "treesets": cmd_treesets,
    "structure-tree": cmd_structure_tree,
    "decompose": cmd_decompose,
    "treeify": cmd_treeify,
    "modulus": cmd_modulus,
    "verify": cmd_verify,
    "bench": cmd_bench,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("graph", nargs="?", help="graph document (JSON); '-' reads stdin")
    common.add_argument("--family", help="generate the input instead, e.g. grid:4x4")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized families")
    common.add_argument("-k", type=int, default=1, help="boundary diameter bound")
    common.add_argument("--filter", choices=[m.value for m in FilterMode], default=FilterMode.IV_AND_OV.value)
    common.add_argument("--max-ball", type=int, default=Caps.max_ball)
    common.add_argument("--max-components", type=int, default=Caps.max_components)
    common.add_argument("--max-cuts", type=int, default=Caps.max_cuts)
    common.add_argument("--dot", help="also write DOT to this path")
    common.add_argument("-o", "--output", help="write the main output here instead of stdout")

    parser = argparse.ArgumentParser(prog="quasitree", description="Cut structure and tree approximation of graphs.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "structure-tree":
            p.add_argument("--treeset", type=int, help="only this treeset index")
        if name in ("decompose", "treeify"):
            p.add_argument("--reenumerate", action="store_true", help="recompute cuts at every stage")
        if name == "modulus":
            p.add_argument("--profile", action="store_true", help="report every scale 0..k")
        if name == "bench":
            p.add_argument("--families", help="comma-separated family specs (default: built-in sweep)")
            p.add_argument("--no-timing", action="store_true", help="leave runtime_ms empty")
            p.add_argument("--jobs", type=int, default=1)
            p.set_defaults(k=2)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    out = open(args.output, "w", encoding="utf-8") if args.output else sys.stdout
    try:
        return COMMANDS[args.command](args, out)
    except (CapExceeded, DocumentError, FamilyError, UsageError, OracleLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CertificateError, DecompositionError, ContractError) as exc:
        print(f"violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    finally:
        if out is not sys.stdout:
            out.close()


if __name__ == "__main__":
    sys.exit(main())
