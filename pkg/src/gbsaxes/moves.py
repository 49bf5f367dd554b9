"""Deformation-space moves: subdivide, collapse, expand, rescale, retree.

Each move produces a new MarkedGraph over the same reference, with the
marking rewritten letter-by-letter and the petal dictionary transported.
Letter rewrites are enough: the moves replace an edge crossing by a fixed
short path, and Britton reduction re-normalizes the syllables.
"""

from __future__ import annotations

import random

from .core import GbsError, GbsGraph, OrientedEdge, is_collapsible, rev_id
from .marked import Hom, MarkedGraph, Presentation
from .words import (GroupWord, britton_reduce, concat, elet, inverse, syl,
                    word_power)


def _rewrite(g_new: GbsGraph, w: GroupWord, edge_map: dict, syl_map: dict | None = None,
             base_map: dict | None = None) -> GroupWord:
    """Apply letter-level substitutions: edge -> letter list, syllable -> (vertex, factor)."""
    letters = []
    for lt in w.letters:
        if lt[0] == "s":
            if syl_map and lt[1] in syl_map:
                v, factor = syl_map[lt[1]]
                letters.append(syl(v, factor * lt[2]))
            else:
                letters.append(lt)
        else:
            letters.extend(edge_map.get(lt[1], (lt,)))
    base = w.base
    if base_map and base in base_map:
        base = base_map[base]
    return britton_reduce(g_new, GroupWord(base, tuple(letters)))


def _remap_marked(m: MarkedGraph, g_new: GbsGraph, tree_new, edge_map: dict,
                  syl_map: dict | None = None, base_map: dict | None = None,
                  value_overrides: dict | None = None,
                  drop_petals: tuple = ()) -> MarkedGraph:
    base = m.pres.base
    if base_map and base in base_map:
        base = base_map[base]
    pres = Presentation(g_new, tree_new, base)
    marking = Hom(m.ref, pres, {
        name: _rewrite(g_new, w, edge_map, syl_map, base_map)
        for name, w in m.marking.images.items()})
    values = dict(value_overrides or {})
    for name, w in m.values.images.items():
        if name in drop_petals or name in values:
            continue
        if name in pres.petal_words:
            values[name] = w
    missing = set(pres.petal_words) - set(values)
    if missing:
        raise GbsError(f"move lost petal values for {sorted(missing)}")
    return MarkedGraph(pres, m.ref, marking, Hom(pres, m.ref, values))


def normalize_volume(m: MarkedGraph) -> MarkedGraph:
    vol = m.graph.volume()
    if vol <= 0:
        raise GbsError("normalize_volume: empty graph")
    if abs(vol - 1.0) < 1e-15:
        return m
    return m.with_graph(m.graph.scaled(1.0 / vol))


def rescale(m: MarkedGraph, factors: dict[str, float]) -> MarkedGraph:
    lengths = {e: m.graph.length(e) * factors.get(e, 1.0) for e in m.graph.forward}
    return m.with_graph(m.graph.with_lengths(lengths))


def _fresh_vertex(g: GbsGraph, stem: str = "w") -> str:
    i = 0
    while f"{stem}{i}" in g.vertices:
        i += 1
    return f"{stem}{i}"


def _fresh_edge(g: GbsGraph, stem: str) -> str:
    i = 0
    while f"{stem}{i}" in g.edges or rev_id(f"{stem}{i}") in g.edges:
        i += 1
    return f"{stem}{i}"


def subdivide(m: MarkedGraph, eid: str, split: tuple[float, float]) -> MarkedGraph:
    """Insert a valence-2 vertex on eid; labels (label(rev e),1 | 1,label(e))."""
    g = m.graph
    l1, l2 = split
    if eid not in g.forward:
        return subdivide(m, g.reverse(eid), (l2, l1))
    e = g.edge(eid)
    if l1 <= 0 or l2 <= 0 or abs((l1 + l2) - e.length) > 1e-9 * max(1.0, e.length):
        raise GbsError("subdivide: split must be positive and sum to len(e)")
    z = _fresh_vertex(g)
    e1 = _fresh_edge(g, f"{eid}p")
    e2 = _fresh_edge(g, f"{eid}q")
    lab_o = g.label(e.rev)

    vertices = g.vertices + (z,)
    edges = {k: v for k, v in g.edges.items() if k not in (eid, e.rev)}
    edges[e1] = OrientedEdge(e1, rev_id(e1), e.origin, z, 1, l1)
    edges[rev_id(e1)] = OrientedEdge(rev_id(e1), e1, z, e.origin, lab_o, l1)
    edges[e2] = OrientedEdge(e2, rev_id(e2), z, e.terminus, e.label, l2)
    edges[rev_id(e2)] = OrientedEdge(rev_id(e2), e2, e.terminus, z, 1, l2)
    forward = tuple(e1 if x == eid else x for x in g.forward) + (e2,)
    g_new = GbsGraph(vertices, edges, forward)

    in_tree = eid in m.pres.tree
    tree = {t for t in m.pres.tree if t not in (eid, e.rev)}
    tree |= {e1}
    if in_tree:
        tree |= {e2}
    edge_map = {eid: (elet(e1), elet(e2)), e.rev: (elet(rev_id(e2)), elet(rev_id(e1)))}

    overrides = {}
    pres_probe = Presentation(g_new, tree, m.pres.base)
    overrides[pres_probe.vertex_petals[z]] = _abstract_power(
        m, m.pres.vertex_petals[e.origin], lab_o)
    if not in_tree:
        old_name = m.pres.edge_petals.get(eid)
        if old_name is None:
            # eid was the reverse of the stored forward orientation
            old_name = m.pres.edge_petals[e.rev]
            overrides[pres_probe.edge_petals[e2]] = m.values.images[old_name]
        else:
            overrides[pres_probe.edge_petals[e2]] = m.values.images[old_name]
    dropped = tuple(n for n in (m.pres.edge_petals.get(eid), m.pres.edge_petals.get(e.rev))
                    if n)
    return _remap_marked(m, g_new, tree, edge_map, value_overrides=overrides,
                         drop_petals=dropped)


def _abstract_power(m: MarkedGraph, petal_name: str, k: int) -> GroupWord:
    ref_g = m.ref.graph
    return britton_reduce(ref_g, word_power(ref_g, m.values.images[petal_name], k))


def retree(m: MarkedGraph, new_tree) -> MarkedGraph:
    """Change the spanning tree; the graph and marking words are untouched."""
    pres = Presentation(m.graph, new_tree, m.pres.base)
    values = {name: m.abstractify(w) for name, w in pres.petal_words.items()}
    marking = Hom(m.ref, pres, m.marking.images)
    return MarkedGraph(pres, m.ref, marking, Hom(pres, m.ref, values))


def rebase(m: MarkedGraph, new_base: str) -> MarkedGraph:
    if new_base == m.pres.base:
        return m
    g = m.graph
    tau = m.pres.tree_path[new_base]
    pres = Presentation(g, set(m.pres.tree), new_base)
    marking = Hom(m.ref, pres, {
        name: britton_reduce(g, concat(g, inverse(g, tau), w, tau))
        for name, w in m.marking.images.items()})
    values = {name: m.abstractify(britton_reduce(g, concat(g, tau, w, inverse(g, tau))))
              for name, w in pres.petal_words.items()}
    return MarkedGraph(pres, m.ref, marking, Hom(pres, m.ref, values))


def collapse(m: MarkedGraph, eid: str) -> MarkedGraph:
    """Collapse a non-loop edge with a ±1 label, merging its small end away."""
    g = m.graph
    if not is_collapsible(g, eid):
        raise GbsError(f"collapse: edge {eid} is not collapsible")
    e = g.edge(eid)
    if abs(e.label) != 1:
        eid = e.rev
        e = g.edge(eid)
    # now label(e) = ±1 at the terminus; that vertex gets absorbed
    if m.pres.base == e.terminus:
        m = rebase(m, e.origin)
        g = m.graph
        e = g.edge(eid)
    if eid not in m.pres.tree:
        # swap eid into the tree: drop one tree edge on the path joining its ends
        path = _tree_path_edges(m.pres, e.origin, e.terminus)
        m = retree(m, {t for t in m.pres.tree if t not in (path[0], g.reverse(path[0]))}
                   | {eid})
        g = m.graph
        e = g.edge(eid)

    u, w_gone = e.origin, e.terminus
    eps = e.label
    lab_rev = g.label(e.rev)
    factor = eps * lab_rev        # x_w = x_u^{eps*label(rev e)}

    vertices = tuple(v for v in g.vertices if v != w_gone)
    edges = {}
    for k, oe in g.edges.items():
        if k in (eid, e.rev):
            continue
        o = u if oe.origin == w_gone else oe.origin
        t = u if oe.terminus == w_gone else oe.terminus
        lab = oe.label * (factor if oe.terminus == w_gone else 1)
        edges[k] = OrientedEdge(k, oe.rev, o, t, lab, oe.length)
    forward = tuple(x for x in g.forward if x != eid and x != e.rev)
    g_new = GbsGraph(vertices, edges, forward)
    tree = {t for t in m.pres.tree if t not in (eid, e.rev)}
    edge_map = {eid: (), e.rev: ()}
    syl_map = {w_gone: (u, factor)}
    drop = (m.pres.vertex_petals[w_gone],)
    return _remap_marked(m, g_new, tree, edge_map, syl_map, value_overrides={},
                         drop_petals=drop)


def _tree_path_edges(pres: Presentation, a: str, b: str) -> list[str]:
    """Oriented tree edges from a to b."""
    g = pres.graph
    wa, wb = pres.tree_path[a].letters, pres.tree_path[b].letters
    i = 0
    while i < len(wa) and i < len(wb) and wa[i] == wb[i]:
        i += 1
    back = [g.reverse(lt[1]) for lt in reversed(wa[i:])]
    fwd = [lt[1] for lt in wb[i:]]
    return back + fwd


def expand(m: MarkedGraph, v: str, dirs, d: int) -> MarkedGraph:
    """Pull the ends in `dirs` off v across a new (d,1)-labelled edge.

    Inverse of collapse: the new edge is collapsible and collapsing it
    returns the original marked graph up to isomorphism.
    """
    g = m.graph
    dirs = set(dirs)
    if d < 2:
        raise GbsError("expand: need d >= 2")
    ends_at_v = set(g.edges_at(v))
    if not dirs or not dirs <= ends_at_v:
        raise GbsError("expand: dirs must be a nonempty set of ends at v")
    if dirs == ends_at_v:
        raise GbsError("expand: moving every end would dangle v")
    for c in dirs:
        if g.label(g.reverse(c)) % d != 0:
            raise GbsError(f"expand: label of {c} at {v} not divisible by {d}")

    z = _fresh_vertex(g)
    n_id = _fresh_edge(g, "n")
    vertices = g.vertices + (z,)
    edges = {}
    for k, oe in g.edges.items():
        o = z if (k in dirs) else oe.origin
        t = z if (oe.rev in dirs) else oe.terminus
        lab = oe.label // d if oe.rev in dirs else oe.label
        edges[k] = OrientedEdge(k, oe.rev, o, t, lab, oe.length)
    half = min(g.length(c) for c in dirs) / 4.0
    edges[n_id] = OrientedEdge(n_id, rev_id(n_id), v, z, 1, half)
    edges[rev_id(n_id)] = OrientedEdge(rev_id(n_id), n_id, z, v, d, half)
    g_new = GbsGraph(vertices, edges, g.forward + (n_id,))
    tree = set(m.pres.tree) | {n_id}
    edge_map = {}
    for c in dirs:
        edge_map[c] = (elet(n_id), elet(c))
        edge_map[g.reverse(c)] = (elet(g.reverse(c)), elet(rev_id(n_id)))
    pres_probe = Presentation(g_new, tree, m.pres.base)
    overrides = {pres_probe.vertex_petals[z]: _abstract_power(m, m.pres.vertex_petals[v], d)}
    return _remap_marked(m, g_new, tree, edge_map, value_overrides=overrides)


MOVE_NAMES = ("subdivide", "collapse", "expand", "rescale")


def random_deform(m: MarkedGraph, steps: int, seed: int, max_edges: int = 9) -> MarkedGraph:
    """Seeded random walk through the move set, volume-normalized at the end."""
    rng = random.Random(seed)
    cur = m
    for _ in range(steps):
        g = cur.graph
        kind = rng.choice(MOVE_NAMES)
        try:
            if kind == "subdivide" and g.n_edges() < max_edges:
                eid = rng.choice(sorted(g.forward))
                frac = rng.uniform(0.25, 0.75)
                cur = subdivide(cur, eid, (frac * g.length(eid),
                                           (1 - frac) * g.length(eid)))
            elif kind == "collapse":
                cands = [e for e in sorted(g.forward) if is_collapsible(g, e)]
                if cands:
                    cur = collapse(cur, rng.choice(cands))
            elif kind == "expand" and g.n_edges() < max_edges:
                v = rng.choice(sorted(g.vertices))
                ends = sorted(g.edges_at(v))
                divisible = {}
                for c in ends:
                    lab = abs(g.label(g.reverse(c)))
                    for p in (2, 3, 5, 7):
                        if lab % p == 0:
                            divisible.setdefault(p, []).append(c)
                opts = [(p, cs) for p, cs in divisible.items() if len(ends) > 1]
                if opts:
                    p, cs = opts[rng.randrange(len(opts))]
                    take = [c for c in cs if rng.random() < 0.6] or [cs[0]]
                    if set(take) != set(ends):
                        cur = expand(cur, v, take, p)
            elif kind == "rescale":
                factors = {e: 2.0 ** rng.uniform(-1, 1) for e in g.forward}
                cur = rescale(cur, factors)
        except GbsError:
            continue
    return normalize_volume(cur)
