"""Whitehead graphs at vertex orbits; connectivity certificates.

The Whitehead graph of a line collection at a vertex orbit has one vertex
per direction (edge germ with residue) and an edge for every turn the
collection crosses, expanded over the diagonal vertex-group shift: a line
crossing one turn makes all its translates cross the shifted turns.

Certificate direction only: if every vertex orbit of some tree carries a
connected, cut-vertex-free Whitehead graph, the element (or pair) is not
simple.  A disconnected or cut-vertexed graph is inconclusive in that tree.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lcm

from .core import GbsError, GbsGraph
from .marked import MarkedGraph
from .moves import random_deform
from .words import CyclicWord, GroupWord, cyclic_reduce, direction_count

Direction = tuple[str, int]


@dataclass
class WhGraph:
    vertex: str
    nodes: tuple[Direction, ...]
    edges: frozenset[frozenset]


@dataclass
class CutReport:
    connected: bool
    cut_vertices: list[Direction]


@dataclass
class Certificate:
    """Witness that the targets are not simple: all Whitehead graphs were
    connected without cut vertices in this tree."""
    n_targets: int
    per_vertex: dict[str, CutReport]


def _turns_of_cyclic(g: GbsGraph, c: CyclicWord):
    n = len(c.edges)
    for i in range(n):
        nxt = c.edges[(i + 1) % n]
        yield ((g.reverse(c.edges[i]), 0), (nxt, c.residues[i] % direction_count(g, nxt)))


def whitehead_graph(m: MarkedGraph, lines, v: str) -> WhGraph:
    """Wh of a collection of lines (cyclic words, or a leaf library) at v."""
    g = m.graph
    if hasattr(lines, "crossed_turn_pairs"):
        pairs = list(lines.crossed_turn_pairs())
    else:
        pairs = []
        for c in lines:
            if not isinstance(c, CyclicWord):
                c = cyclic_reduce(g, c)[0]
            if c.is_elliptic():
                raise GbsError("whitehead_graph: elliptic line")
            pairs.extend(_turns_of_cyclic(g, c))
    nodes = tuple(sorted((e, r) for e in g.edges_at(v)
                         for r in range(direction_count(g, e))))
    edges = set()
    for (e1, r1), (e2, r2) in pairs:
        if g.origin(e1) != v:
            continue
        m1, m2 = direction_count(g, e1), direction_count(g, e2)
        for s in range(lcm(m1, m2)):
            d1 = (e1, (r1 + s) % m1)
            d2 = (e2, (r2 + s) % m2)
            if d1 != d2:
                edges.add(frozenset((d1, d2)))
    return WhGraph(v, nodes, frozenset(edges))


def cut_analysis(w: WhGraph) -> CutReport:
    """Connectivity plus articulation points (Hopcroft-Tarjan, iterative)."""
    adj: dict[Direction, set[Direction]] = {d: set() for d in w.nodes}
    for e in w.edges:
        a, b = tuple(e)
        adj[a].add(b)
        adj[b].add(a)
    disc: dict[Direction, int] = {}
    low: dict[Direction, int] = {}
    cuts: set[Direction] = set()
    time = 0
    components = 0
    for root in w.nodes:
        if root in disc:
            continue
        components += 1
        root_children = 0
        stack = [(root, None, iter(sorted(adj[root])))]
        disc[root] = low[root] = time
        time += 1
        while stack:
            node, parent, it = stack[-1]
            advanced = False
            for nb in it:
                if nb == parent:
                    continue
                if nb in disc:
                    low[node] = min(low[node], disc[nb])
                    continue
                disc[nb] = low[nb] = time
                time += 1
                if node == root:
                    root_children += 1
                stack.append((nb, node, iter(sorted(adj[nb]))))
                advanced = True
                break
            if not advanced:
                stack.pop()
                if stack:
                    p = stack[-1][0]
                    low[p] = min(low[p], low[node])
                    if stack[-1][0] != root and low[node] >= disc[p]:
                        cuts.add(p)
        if root_children > 1:
            cuts.add(root)
    return CutReport(components == 1 and len(w.nodes) > 0, sorted(cuts))


def nonsimplicity_certificate(m: MarkedGraph, targets) -> Certificate | None:
    """One-sided test: every Wh graph connected without cut vertex certifies
    that the element (or the pair) is not simple; otherwise inconclusive here."""
    if isinstance(targets, (GroupWord, CyclicWord)):
        targets = [targets]
    g = m.graph
    cycs = []
    for t in targets:
        c = t if isinstance(t, CyclicWord) else cyclic_reduce(g, t)[0]
        if c.is_elliptic():
            raise GbsError("nonsimplicity_certificate: elliptic target")
        cycs.append(c)
    per = {}
    for v in g.vertices:
        rep = cut_analysis(whitehead_graph(m, cycs, v))
        per[v] = rep
        if not rep.connected or rep.cut_vertices:
            return None
    return Certificate(len(cycs), per)


def simplicity_search(m: MarkedGraph, target: GroupWord, tries: int, seed: int,
                      steps: int = 4):
    """Heuristic only: hunt random trees for a disconnecting vertex.

    Finding one is evidence towards simplicity, never a proof; the unfolding
    construction that decides the question is out of scope.
    """
    abstract = m.abstractify(target) if target.base == m.pres.base else None
    if abstract is None:
        raise GbsError("simplicity_search: target must be based at the base vertex")
    hits = []
    for i in range(tries):
        x = random_deform(m, steps, seed + i)
        w = x.concretize(abstract)
        c = cyclic_reduce(x.graph, w)[0]
        if c.is_elliptic():
            continue
        for v in x.graph.vertices:
            rep = cut_analysis(whitehead_graph(x, [c], v))
            if not rep.connected or rep.cut_vertices:
                hits.append((i, v, rep.connected))
                break
    return {"tries": tries, "trees_with_bad_vertex": len(hits), "first_hits": hits[:5]}


def to_dot(w: WhGraph) -> str:
    def name(d: Direction) -> str:
        return f'"{d[0]}:{d[1]}"'

    lines = [f'graph "wh_{w.vertex}" {{']
    for d in w.nodes:
        lines.append(f"  {name(d)};")
    for e in sorted(w.edges, key=sorted):
        a, b = sorted(e)
        lines.append(f"  {name(a)} -- {name(b)};")
    lines.append("}")
    return "\n".join(lines)
