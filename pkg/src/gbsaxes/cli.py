"""Command line front end: graph/word/move/dist/tt/lam/wh/axis/examples."""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from . import corpus, jsonio
from .axis import Axis, AxisConfig, contraction_experiment
from .core import GbsError, betti_number, graph_stats, validate_graph
from .lamination import (detect_pieces, lamination_ratio, leaf_library,
                         load_library, save_library)
from .lipschitz import lipschitz_distance, sup_check_random
from .marked import MarkedGraph
from .moves import collapse, expand, normalize_volume, random_deform, subdivide
from .traintrack import TrainTrackMap
from .whitehead import (cut_analysis, nonsimplicity_certificate, to_dot,
                        whitehead_graph)
from .words import (axis_turns, britton_reduce, cyclic_reduce, translation_length,
                    word_from_text, word_to_text)


def _emit(data) -> None:
    json.dump(data, sys.stdout, indent=2, sort_keys=True, default=str)
    sys.stdout.write("\n")


def _load_marked(path: str) -> MarkedGraph:
    return jsonio.marked_from_json(jsonio.load(path))


def _load_tt(path: str) -> TrainTrackMap:
    return jsonio.ttmap_from_json(jsonio.load(path))


def _word(m: MarkedGraph, base: str, items: list[str]):
    return word_from_text(m.graph, base, items)


def cmd_examples(args) -> None:
    os.makedirs(args.out, exist_ok=True)
    ex = corpus.load(args.name, args.n)
    path = os.path.join(args.out, f"{args.name}.json")
    jsonio.dump(jsonio.marked_to_json(ex.marked), path)
    written = [path]
    if isinstance(ex, corpus.TrainTrackExample):
        p0 = os.path.join(args.out, f"{args.name}-pf.json")
        p1 = os.path.join(args.out, f"{args.name}-phi.json")
        p2 = os.path.join(args.out, f"{args.name}-phi-inv.json")
        jsonio.dump(jsonio.marked_to_json(ex.tt_plus.domain), p0)
        jsonio.dump(jsonio.ttmap_to_json(ex.tt_plus), p1)
        jsonio.dump(jsonio.ttmap_to_json(ex.tt_minus), p2)
        written += [p0, p1, p2]
    _emit({"written": written})


def cmd_graph(args) -> None:
    m = _load_marked(args.file)
    if args.action == "validate":
        rep = validate_graph(m.graph)
        marked_bad = m.validate()
        _emit({"ok": rep.ok and not marked_bad,
               "violations": rep.violations + marked_bad,
               "warnings": rep.warnings})
    elif args.action == "stats":
        st = graph_stats(m.graph)
        _emit({"volume": st.volume, "betti": betti_number(m.graph),
               "big_vertex_count": st.big_vertex_count,
               "collapsible_edges": list(st.collapsible_edges)})
    elif args.action == "normalize":
        out = normalize_volume(m)
        jsonio.dump(jsonio.marked_to_json(out), args.out)
        _emit({"written": args.out, "volume": out.graph.volume()})


def cmd_word(args) -> None:
    m = _load_marked(args.graph)
    w = _word(m, args.base, args.letters)
    if args.action == "reduce":
        _emit({"reduced": word_to_text(britton_reduce(m.graph, w))})
    elif args.action == "length":
        _emit({"translation_length": translation_length(m.graph, w)})
    elif args.action == "turns":
        counts = axis_turns(m.graph, w)
        _emit({"turns": [{"vertex": k[0], "directions": list(map(list, k[1])),
                          "count": v} for k, v in sorted(counts.items())]})


def cmd_move(args) -> None:
    m = _load_marked(args.file)
    if args.action == "subdivide":
        l = m.graph.length(args.edge)
        out = subdivide(m, args.edge, (args.at * l, (1 - args.at) * l))
    elif args.action == "collapse":
        out = collapse(m, args.edge)
    elif args.action == "expand":
        out = expand(m, args.vertex, args.dirs, args.divisor)
    else:
        out = random_deform(m, args.steps, args.seed)
    jsonio.dump(jsonio.marked_to_json(out), args.out)
    _emit({"written": args.out})


def cmd_dist(args) -> None:
    a = _load_marked(args.a)
    b = _load_marked(args.b)
    res = lipschitz_distance(a, b)
    out = {"lip": res.lip, "d_lip": res.d_lip}
    if args.report == "witness":
        out["witness_word"] = {"shape": res.witness.shape,
                               "edges": list(res.witness.cyclic.edges),
                               "residues": list(res.witness.cyclic.residues)}
    if args.check > 0:
        sup = sup_check_random(a, b, args.check, args.seed)
        out["random_sup"] = sup
        out["sup_within_candidates"] = sup <= res.lip + 1e-9
    _emit(out)


def cmd_tt(args) -> None:
    tt = _load_tt(args.file)
    if args.action == "check":
        ok, problems = tt.verdict()
        rep = tt.validate()
        _emit({"train_track": ok, "problems": problems,
               "map_valid": rep.ok, "map_violations": rep.violations,
               "lambda": tt.lam,
               "gates": {v: len(tt.gates_at(v)) for v in tt.graph.vertices}})
    elif args.action == "constants":
        c = tt.constants()
        _emit({"lambda": c.lam, "bcc": c.bcc, "c_f": c.c_f, "kappa": c.kappa})
    elif args.action == "iterate":
        w = word_from_text(tt.graph, args.base, args.letters)
        out = tt.iterate_tighten(w, args.n)
        _emit({"image": word_to_text(out),
               "length": sum(tt.graph.length(lt[1]) for lt in out.letters
                             if lt[0] == "e")})


def cmd_lam(args) -> None:
    tt = _load_tt(args.map)
    if args.action == "build":
        lib = leaf_library(tt, args.depth)
        save_library(lib, args.out)
        _emit({"written": args.out, "entries": len(lib.entries),
               "prim_exponent": lib.prim_exponent,
               "quasiperiodicity_defects": len(lib.quasiperiodicity_defects())})
        return
    lib = load_library(tt, args.lib) if args.lib else leaf_library(tt, args.depth)
    w = word_from_text(tt.graph, args.base, args.letters)
    axis_cyc = cyclic_reduce(tt.graph, w)[0]
    if args.action == "pieces":
        pieces = detect_pieces(axis_cyc, lib, args.min_len)
        _emit({"pieces": [dataclasses.asdict(p) for p in pieces]})
    else:
        _emit({"ratio": lamination_ratio(axis_cyc, lib, args.min_len)})


def cmd_wh(args) -> None:
    m = _load_marked(args.graph)
    words = []
    for spec in args.word:
        base, *letters = spec.split(",")
        words.append(cyclic_reduce(m.graph, _word(m, base, letters))[0])
    if args.action == "graph":
        v = args.vertex or m.graph.vertices[0]
        wh = whitehead_graph(m, words, v)
        rep = cut_analysis(wh)
        if args.dot:
            with open(args.dot, "w") as fh:
                fh.write(to_dot(wh) + "\n")
        _emit({"vertex": v, "nodes": len(wh.nodes), "edges": len(wh.edges),
               "connected": rep.connected,
               "cut_vertices": [list(c) for c in rep.cut_vertices],
               "dot": args.dot})
    else:
        cert = nonsimplicity_certificate(m, words)
        if cert is None:
            _emit({"certified_nonsimple": False,
                   "note": "some Whitehead graph is disconnected or has a cut "
                           "vertex; inconclusive in this tree"})
        else:
            _emit({"certified_nonsimple": True,
                   "vertices_checked": sorted(cert.per_vertex)})


def _axis_from_args(args) -> Axis:
    ttp = _load_tt(args.plus)
    ttm = _load_tt(args.minus)
    return Axis(ttp, ttm, ttp.phi, ttm.phi)


def _config_from_args(args) -> AxisConfig:
    cfg = AxisConfig()
    if args.config:
        data = jsonio.load(args.config)
        for k, v in data.items():
            if not hasattr(cfg, k):
                raise GbsError(f"unknown config key {k!r}")
            setattr(cfg, k, v)
    if args.seed is not None:
        cfg.seed = args.seed
    return cfg


def cmd_axis(args) -> None:
    ax = _axis_from_args(args)
    cfg = _config_from_args(args)
    if args.action == "project":
        x = _load_marked(args.tree)
        pd = ax.project_tree(x, cfg)
        _emit({"t_x": pd.t_x, "d_min": pd.d_min,
               "theta": [pd.theta_t_min, pd.theta_t_max],
               "nearest_power": pd.pi_x.n,
               "epsilon0": cfg.epsilon0})
    elif args.action == "theta":
        g = word_from_text(ax.graph, args.base, args.letters)
        th = ax.theta_of_element(g, cfg)
        ex = ax.legality_exponents(g, cfg)
        _emit({"theta": [th.t_min, th.t_max], "diameter": th.diameter,
               "t0": th.t0, "k_plus": ex.k_plus, "k_minus": ex.k_minus})
    else:
        rep = contraction_experiment(ax, cfg, workers=args.workers or 1)
        with open(args.out, "w") as fh:
            fh.write(rep.to_csv())
        summary = {"schema": "report.v1", "csv": args.out,
                   "balls": len(rep.rows),
                   "defect_c1": rep.defect_c1, "defect_c2": rep.defect_c2,
                   "sandwich_c": rep.sandwich_c, "params": rep.params}
        if args.figdir:
            from .plots import plot_experiment
            summary["figures"] = plot_experiment(rep, args.figdir)
        if args.summary:
            jsonio.dump(summary, args.summary)
        _emit(summary)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gbs",
                                description="GBS deformation spaces: normal forms, "
                                            "Lipschitz metric, train tracks, axes")
    sub = p.add_subparsers(dest="cmd", required=True)

    q = sub.add_parser("examples", help="materialize a bundled example")
    q.add_argument("--name", required=True, choices=sorted(corpus.EXAMPLES))
    q.add_argument("--n", type=int, default=2, help="edge index parameter")
    q.add_argument("--out", default=".")
    q.set_defaults(fn=cmd_examples)

    q = sub.add_parser("graph", help="validate / stats / normalize")
    q.add_argument("action", choices=["validate", "stats", "normalize"])
    q.add_argument("file")
    q.add_argument("--out", default="normalized.json")
    q.set_defaults(fn=cmd_graph)

    q = sub.add_parser("word", help="reduce / length / turns")
    q.add_argument("action", choices=["reduce", "length", "turns"])
    q.add_argument("--graph", required=True)
    q.add_argument("--base", required=True)
    q.add_argument("letters", nargs="*")
    q.set_defaults(fn=cmd_word)

    q = sub.add_parser("move", help="subdivide / collapse / expand / random")
    q.add_argument("action", choices=["subdivide", "collapse", "expand", "random"])
    q.add_argument("file")
    q.add_argument("--edge")
    q.add_argument("--at", type=float, default=0.5)
    q.add_argument("--vertex")
    q.add_argument("--dirs", nargs="*", default=[])
    q.add_argument("--divisor", type=int, default=2)
    q.add_argument("--steps", type=int, default=5)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out", default="moved.json")
    q.set_defaults(fn=cmd_move)

    q = sub.add_parser("dist", help="Lipschitz distance via candidates")
    q.add_argument("a")
    q.add_argument("b")
    q.add_argument("--report", choices=["witness", "none"], default="none")
    q.add_argument("--check", type=int, default=0,
                   help="also sup over this many random classes")
    q.add_argument("--seed", type=int, default=0)
    q.set_defaults(fn=cmd_dist)

    q = sub.add_parser("tt", help="check / constants / iterate")
    q.add_argument("action", choices=["check", "constants", "iterate"])
    q.add_argument("file")
    q.add_argument("--base")
    q.add_argument("--n", type=int, default=1)
    q.add_argument("letters", nargs="*")
    q.set_defaults(fn=cmd_tt)

    q = sub.add_parser("lam", help="build / pieces / ratio")
    q.add_argument("action", choices=["build", "pieces", "ratio"])
    q.add_argument("--map", required=True)
    q.add_argument("--depth", type=int, default=8)
    q.add_argument("--lib")
    q.add_argument("--out", default="leaves.bin")
    q.add_argument("--base")
    q.add_argument("--min-len", dest="min_len", type=float, default=0.0)
    q.add_argument("letters", nargs="*")
    q.set_defaults(fn=cmd_lam)

    q = sub.add_parser("wh", help="whitehead graph / certify")
    q.add_argument("action", choices=["graph", "certify"])
    q.add_argument("--graph", required=True)
    q.add_argument("--word", action="append", required=True,
                   help="comma-separated: base,letter,letter,...")
    q.add_argument("--vertex")
    q.add_argument("--dot")
    q.set_defaults(fn=cmd_wh)

    q = sub.add_parser("axis", help="project / theta / experiment")
    q.add_argument("action", choices=["project", "theta", "experiment"])
    q.add_argument("--plus", required=True, help="tt-map.v1 for phi")
    q.add_argument("--minus", required=True, help="tt-map.v1 for phi^-1")
    q.add_argument("--tree")
    q.add_argument("--base")
    q.add_argument("--config")
    q.add_argument("--seed", type=int, default=None)
    q.add_argument("--workers", type=int, default=os.cpu_count(),
                   help="process pool size for the experiment")
    q.add_argument("--out", default="report.csv")
    q.add_argument("--figdir")
    q.add_argument("--summary")
    q.add_argument("letters", nargs="*")
    q.set_defaults(fn=cmd_axis)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.fn(args)
    except GbsError as exc:
        json.dump({"error": type(exc).__name__, "detail": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
