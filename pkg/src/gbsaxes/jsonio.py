"""JSON schemas: gbs-graph.v1, tt-map.v1, report.v1.

Words serialize as {"base": vertex, "letters": [...]} with syllables written
``v^k`` and edge letters as bare edge ids.  Marked graphs carry both
dictionaries and an inline copy of the reference presentation so files are
self-contained; serialization is canonical and round-trips exactly.
"""

from __future__ import annotations

import json
from typing import Any

from .core import GbsError, GbsGraph, OrientedEdge
from .marked import Hom, MarkedGraph, Presentation, Substitution
from .traintrack import TrainTrackMap
from .words import GroupWord, word_from_text, word_to_text


def word_to_json(w: GroupWord) -> dict:
    return {"base": w.base, "letters": word_to_text(w)}


def word_from_json(g: GbsGraph, data: dict) -> GroupWord:
    return word_from_text(g, data["base"], list(data["letters"]))


def graph_to_json(g: GbsGraph) -> dict:
    edges = []
    for eid in g.forward:
        e = g.edges[eid]
        r = g.edges[e.rev]
        edges.append({"id": e.id, "rev": e.rev, "o": e.origin, "t": e.terminus,
                      "label_at_t": e.label, "label_at_o": r.label, "len": e.length})
    return {"vertices": list(g.vertices), "edges": edges}


def graph_from_json(data: dict) -> GbsGraph:
    edges: dict[str, OrientedEdge] = {}
    forward = []
    for spec in data["edges"]:
        eid, rid = spec["id"], spec["rev"]
        edges[eid] = OrientedEdge(eid, rid, spec["o"], spec["t"],
                                  int(spec["label_at_t"]), float(spec["len"]))
        edges[rid] = OrientedEdge(rid, eid, spec["t"], spec["o"],
                                  int(spec["label_at_o"]), float(spec["len"]))
        forward.append(eid)
    return GbsGraph(tuple(data["vertices"]), edges, tuple(forward))


def _pres_to_json(p: Presentation) -> dict:
    return {**graph_to_json(p.graph),
            "spanning_tree": sorted(e for e in p.tree if e in p.graph.forward),
            "base": p.base}


def _pres_from_json(data: dict) -> Presentation:
    return Presentation(graph_from_json(data), data["spanning_tree"], data["base"])


def marked_to_json(m: MarkedGraph) -> dict:
    out = {"schema": "gbs-graph.v1"}
    out.update(_pres_to_json(m.pres))
    out["marking"] = {name: word_to_json(w) for name, w in sorted(m.marking.images.items())}
    out["values"] = {name: word_to_json(w) for name, w in sorted(m.values.images.items())}
    if m.ref is m.pres:
        out["ref"] = "self"
    else:
        out["ref"] = _pres_to_json(m.ref)
    return out


def marked_from_json(data: dict) -> MarkedGraph:
    if data.get("schema") != "gbs-graph.v1":
        raise GbsError("expected schema gbs-graph.v1")
    pres = _pres_from_json(data)
    ref = pres if data["ref"] == "self" else _pres_from_json(data["ref"])
    marking = Hom(ref, pres, {name: word_from_json(pres.graph, w)
                              for name, w in data["marking"].items()})
    values = Hom(pres, ref, {name: word_from_json(ref.graph, w)
                             for name, w in data["values"].items()})
    return MarkedGraph(pres, ref, marking, values)


def ttmap_to_json(tt: TrainTrackMap) -> dict:
    g = tt.graph
    return {
        "schema": "tt-map.v1",
        "graph_ref": marked_to_json(tt.domain),
        "edge_images": {e: word_to_json(tt.images[e]) for e in g.forward},
        "vertex_rules": {v: {"target": tgt, "mult": mu, "conj": word_to_json(c)}
                         for v, (tgt, mu, c) in sorted(tt.vertex_rules.items())},
        "phi": {name: word_to_json(w) for name, w in sorted(tt.phi.images.items())},
    }


def ttmap_from_json(data: dict) -> TrainTrackMap:
    if data.get("schema") != "tt-map.v1":
        raise GbsError("expected schema tt-map.v1")
    dom = marked_from_json(data["graph_ref"])
    g = dom.graph
    images = {e: word_from_json(g, w) for e, w in data["edge_images"].items()}
    rules = {v: (spec["target"], int(spec["mult"]), word_from_json(g, spec["conj"]))
             for v, spec in data["vertex_rules"].items()}
    phi = Substitution(dom.ref, {name: word_from_json(dom.ref.graph, w)
                                 for name, w in data["phi"].items()})
    return TrainTrackMap(dom, images, rules, phi)


def dump(obj: Any, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load(path: str) -> Any:
    with open(path) as fh:
        return json.load(fh)
