"""Labeled graphs of infinite-cyclic groups: the quotient data of a GBS tree.

Vertices carry a copy of Z generated by ``x_v``.  Each oriented edge carries
an integer label: ``label(e)`` is the index of the edge group inside the
vertex group at ``terminus(e)``, so ``label(rev(e))`` is the index at the
origin.  Lengths live on unoriented edges and are stored symmetrically on
both orientations.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace


class GbsError(Exception):
    """Domain error raised by graph/word operations."""


@dataclass(frozen=True)
class OrientedEdge:
    id: str
    rev: str
    origin: str
    terminus: str
    label: int      # index of the edge group in the vertex group at `terminus`
    length: float


@dataclass(frozen=True)
class GbsGraph:
    vertices: tuple[str, ...]
    edges: dict[str, OrientedEdge] = field(compare=False)
    forward: tuple[str, ...] = ()   # one chosen orientation per unoriented edge

    # -- basic accessors ---------------------------------------------------

    def edge(self, eid: str) -> OrientedEdge:
        try:
            return self.edges[eid]
        except KeyError:
            raise GbsError(f"unknown edge {eid!r}")

    def reverse(self, eid: str) -> str:
        return self.edge(eid).rev

    def origin(self, eid: str) -> str:
        return self.edge(eid).origin

    def terminus(self, eid: str) -> str:
        return self.edge(eid).terminus

    def label(self, eid: str) -> int:
        return self.edge(eid).label

    def length(self, eid: str) -> float:
        return self.edge(eid).length

    def origin_index(self, eid: str) -> int:
        """|label at the origin| = number of directions at a vertex in this edge's orbit."""
        return abs(self.edge(self.edge(eid).rev).label)

    def edges_at(self, v: str) -> list[str]:
        return [e.id for e in self.edges.values() if e.origin == v]

    def volume(self) -> float:
        return sum(self.edges[e].length for e in self.forward)

    def n_edges(self) -> int:
        return len(self.forward)

    def with_lengths(self, lengths: dict[str, float]) -> "GbsGraph":
        """New graph with lengths reassigned per unoriented edge (keys: forward ids)."""
        new = {}
        for e in self.edges.values():
            l = lengths.get(e.id, lengths.get(e.rev, e.length))
            new[e.id] = replace(e, length=l)
        return GbsGraph(self.vertices, new, self.forward)

    def scaled(self, factor: float) -> "GbsGraph":
        new = {eid: replace(e, length=e.length * factor) for eid, e in self.edges.items()}
        return GbsGraph(self.vertices, new, self.forward)


def rev_id(eid: str) -> str:
    """Naming convention used by the builders: reverse of `a` is `a~`."""
    return eid[:-1] if eid.endswith("~") else eid + "~"


def build_graph(vertices, edge_specs) -> GbsGraph:
    """Assemble a GbsGraph from one spec per unoriented edge.

    Each spec is ``(id, origin, terminus, label_at_origin, label_at_terminus,
    length)``; the reverse orientation gets id ``id~``.
    """
    edges: dict[str, OrientedEdge] = {}
    forward = []
    for eid, o, t, lab_o, lab_t, length in edge_specs:
        rid = rev_id(eid)
        edges[eid] = OrientedEdge(eid, rid, o, t, lab_t, float(length))
        edges[rid] = OrientedEdge(rid, eid, t, o, lab_o, float(length))
        forward.append(eid)
    return GbsGraph(tuple(vertices), edges, tuple(forward))


# -- validation --------------------------------------------------------------

@dataclass
class ValidationReport:
    ok: bool
    violations: list[tuple[str, str]]   # (code, detail)
    warnings: list[str]

    def __bool__(self) -> bool:
        return self.ok


def _connected(g: GbsGraph) -> bool:
    if not g.vertices:
        return False
    seen = {g.vertices[0]}
    stack = [g.vertices[0]]
    while stack:
        v = stack.pop()
        for eid in g.edges_at(v):
            w = g.terminus(eid)
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(g.vertices)


def validate_graph(g: GbsGraph) -> ValidationReport:
    """Check the involution/incidence/label/length invariants, reporting every violation."""
    bad: list[tuple[str, str]] = []
    warn: list[str] = []
    for e in g.edges.values():
        r = g.edges.get(e.rev)
        if r is None:
            bad.append(("missing reverse", e.id))
            continue
        if r.rev != e.id:
            bad.append(("involution broken", e.id))
        if r.id == e.id:
            bad.append(("self-reverse edge", e.id))
        if e.origin != r.terminus or e.terminus != r.origin:
            bad.append(("incidence mismatch", e.id))
        if e.label == 0:
            bad.append(("zero label", e.id))
        if e.length <= 0:
            bad.append(("nonpositive length", e.id))
        if r.length != e.length:
            bad.append(("asymmetric length", e.id))
        if e.origin not in g.vertices or e.terminus not in g.vertices:
            bad.append(("unknown endpoint", e.id))
    if not _connected(g):
        bad.append(("disconnected", ""))

    if not bad:
        # Z^2 / Klein bottle / BS(1,n) are excluded from the well-behaved
        # deformation space; we can only flag the suspicious shapes.
        if betti_number(g) == 1 and all(len(g.edges_at(v)) == 2 for v in g.vertices):
            if all(abs(e.label) == 1 for e in g.edges.values()):
                warn.append("possibly solvable: circle graph with all labels ±1")
        if g.n_edges() == 1:
            e = g.edges[g.forward[0]]
            if e.origin == e.terminus and (abs(e.label) == 1 or abs(g.edges[e.rev].label) == 1):
                warn.append("possibly solvable: BS(1,n) shape")
    return ValidationReport(not bad, bad, warn)


def betti_number(g: GbsGraph) -> int:
    """First Betti number b1 = #E - #V + 1 (unoriented edge count)."""
    if not _connected(g):
        raise GbsError("betti_number: graph is disconnected")
    return g.n_edges() - len(g.vertices) + 1


def is_collapsible(g: GbsGraph, eid: str) -> bool:
    """Collapsible: not a loop, and one of the two labels is ±1."""
    e = g.edge(eid)
    if e.origin == e.terminus:
        return False
    return abs(e.label) == 1 or abs(g.edges[e.rev].label) == 1


@dataclass
class GraphStats:
    volume: float
    big_vertex_count: int
    collapsible_edges: tuple[str, ...]


def graph_stats(g: GbsGraph) -> GraphStats:
    """Volume, number of big vertices, and the collapsible edge set.

    A vertex is big when every incident oriented-edge end has index > 1
    there, i.e. its vertex group properly contains all incident edge groups.
    """
    big = 0
    for v in g.vertices:
        ends = g.edges_at(v)
        if ends and all(g.origin_index(e) > 1 for e in ends):
            big += 1
    coll = tuple(e for e in g.forward if is_collapsible(g, e))
    return GraphStats(g.volume(), big, coll)
