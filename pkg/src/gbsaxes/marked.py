"""Marked graphs: presentations, petal generators, markings and transport.

A Presentation fixes a spanning tree and base vertex, giving the standard
generating set of the fundamental group: one petal loop per vertex group
(``x_<v>``) and one per non-tree edge (``t_<e>``).  Any loop word decomposes
as a product of petals, so a homomorphism is a finite dictionary of petal
images; markings, their inverses and automorphisms are all the same object.

A session fixes one reference presentation; "abstract" elements of G are
loop words over it.  A MarkedGraph is a presentation plus dictionaries both
ways to the reference, which is exactly a point of the deformation space
with a computable change of coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import GbsError, GbsGraph
from .words import (CyclicWord, GroupWord, britton_reduce, check_word, concat,
                    cyclic_reduce, elet, inverse, is_trivial, syl,
                    translation_length, word_power)


class Presentation:
    """Graph + spanning tree + base vertex, with petal generators."""

    def __init__(self, graph: GbsGraph, tree, base: str):
        self.graph = graph
        self.tree = frozenset(tree) | {graph.reverse(e) for e in tree}
        self.base = base
        if base not in graph.vertices:
            raise GbsError(f"base {base!r} not a vertex")
        self._check_spanning()
        self.tree_path = self._tree_paths()
        self.vertex_petals = {v: f"x_{v}" for v in graph.vertices}
        self.edge_petals = {e: f"t_{e}" for e in graph.forward if e not in self.tree}
        self.petal_words = self._petal_words()

    def _check_spanning(self):
        g = self.graph
        n_tree = sum(1 for e in g.forward if e in self.tree)
        if n_tree != len(g.vertices) - 1:
            raise GbsError("spanning tree has wrong edge count")
        seen = {self.base}
        stack = [self.base]
        while stack:
            v = stack.pop()
            for e in g.edges_at(v):
                if e in self.tree and g.terminus(e) not in seen:
                    seen.add(g.terminus(e))
                    stack.append(g.terminus(e))
        if len(seen) != len(g.vertices):
            raise GbsError("spanning tree does not span")

    def _tree_paths(self) -> dict[str, GroupWord]:
        g = self.graph
        paths = {self.base: GroupWord(self.base)}
        frontier = [self.base]
        while frontier:
            v = frontier.pop()
            for e in g.edges_at(v):
                w = g.terminus(e)
                if e in self.tree and w not in paths:
                    paths[w] = GroupWord(self.base, paths[v].letters + (elet(e),))
                    frontier.append(w)
        return paths

    def _petal_words(self) -> dict[str, GroupWord]:
        g = self.graph
        out = {}
        for v, name in self.vertex_petals.items():
            tau = self.tree_path[v]
            out[name] = britton_reduce(g, concat(g, tau, GroupWord(v, (syl(v, 1),)),
                                                 inverse(g, tau)))
        for e, name in self.edge_petals.items():
            tau_o = self.tree_path[g.origin(e)]
            tau_t = self.tree_path[g.terminus(e)]
            out[name] = britton_reduce(g, concat(g, tau_o, GroupWord(g.origin(e), (elet(e),)),
                                                 inverse(g, tau_t)))
        return out

    def decompose(self, w: GroupWord):
        """Loop word -> list of (petal name, exponent); tree edges vanish."""
        if w.base != self.base:
            raise GbsError("decompose: word not based at the presentation base")
        g = self.graph
        out = []
        for lt in w.letters:
            if lt[0] == "s":
                out.append((self.vertex_petals[lt[1]], lt[2]))
            else:
                e = lt[1]
                if e in self.tree:
                    continue
                if e in self.edge_petals:
                    out.append((self.edge_petals[e], 1))
                else:
                    out.append((self.edge_petals[g.reverse(e)], -1))
        return out

    def relation_words(self) -> list[GroupWord]:
        """One Britton relation per unoriented edge, as an unreduced loop at base."""
        g = self.graph
        rels = []
        for e in g.forward:
            o, t = g.origin(e), g.terminus(e)
            tau = self.tree_path[o]
            mid = GroupWord(o, (elet(e), syl(t, g.label(e)), elet(g.reverse(e)),
                                syl(o, -g.label(g.reverse(e)))))
            rels.append(concat(g, tau, mid, inverse(g, tau)))
        return rels

    def loop(self, letters) -> GroupWord:
        w = GroupWord(self.base, tuple(letters))
        check_word(self.graph, w)
        return w


class Hom:
    """Homomorphism given by petal images; src and dst may coincide."""

    def __init__(self, src: Presentation, dst: Presentation, images: dict[str, GroupWord]):
        self.src = src
        self.dst = dst
        self.images = {k: britton_reduce(dst.graph, w) for k, w in images.items()}
        missing = (set(src.petal_words) - set(self.images))
        if missing:
            raise GbsError(f"hom misses petal images: {sorted(missing)}")
        self._elliptic = {}
        for v, name in src.vertex_petals.items():
            cyc, conj = cyclic_reduce(dst.graph, self.images[name])
            if not cyc.is_elliptic():
                raise GbsError(f"image of vertex petal {name} is not elliptic")
            self._elliptic[name] = (conj, cyc.vertex, cyc.exponent)
        self._inv_images = {name: inverse(dst.graph, w) for name, w in self.images.items()}

    def _petal_power(self, name: str, k: int) -> tuple:
        if name in self._elliptic:
            conj, v, d = self._elliptic[name]
            if d * k == 0:
                return ()
            core = GroupWord(v, (syl(v, d * k),))
            return concat(self.dst.graph, conj, core,
                          inverse(self.dst.graph, conj)).letters
        w = self.images[name] if k > 0 else self._inv_images[name]
        return w.letters * abs(k)

    def apply(self, w: GroupWord) -> GroupWord:
        letters: list = []
        for name, k in self.src.decompose(w):
            letters.extend(self._petal_power(name, k))
        return britton_reduce(self.dst.graph, GroupWord(self.dst.base, tuple(letters)))

    def validate(self) -> list[str]:
        """Relation preservation via Britton reduction; empty list when a hom."""
        bad = []
        for rel in self.src.relation_words():
            if not is_trivial(self.dst.graph, self.apply(rel)):
                bad.append(f"relation broken at {rel.letters}")
        return bad

    def compose(self, inner: "Hom") -> "Hom":
        """self o inner (inner first)."""
        if inner.dst is not self.src and inner.dst.petal_words.keys() != self.src.petal_words.keys():
            raise GbsError("compose: presentations do not chain")
        images = {name: self.apply(w) for name, w in inner.images.items()}
        return Hom(inner.src, self.dst, images)


def identity_hom(pres: Presentation) -> Hom:
    return Hom(pres, pres, dict(pres.petal_words))


@dataclass
class MarkedGraph:
    """A point of the deformation space: presentation + coordinates to and from the reference."""
    pres: Presentation
    ref: Presentation
    marking: Hom     # ref petals -> words here
    values: Hom      # petals here -> abstract words over the reference

    @property
    def graph(self) -> GbsGraph:
        return self.pres.graph

    def concretize(self, abstract: GroupWord) -> GroupWord:
        return self.marking.apply(abstract)

    def abstractify(self, w: GroupWord) -> GroupWord:
        return self.values.apply(w)

    def abstract_length(self, abstract: GroupWord | CyclicWord) -> float:
        if isinstance(abstract, CyclicWord):
            from .words import cyclic_to_loop
            abstract = cyclic_to_loop(self.ref.graph, abstract)
        return translation_length(self.graph, self.concretize(abstract))

    def with_graph(self, graph: GbsGraph) -> "MarkedGraph":
        """Same marked point with a re-metrized copy of the same graph."""
        pres = Presentation(graph, {e for e in self.pres.tree}, self.pres.base)
        marking = Hom(self.ref, pres, self.marking.images)
        values = Hom(pres, self.ref, self.values.images)
        return MarkedGraph(pres, self.ref, marking, values)

    def validate(self) -> list[str]:
        bad = self.marking.validate()
        bad += self.values.validate()
        for name, w in self.pres.petal_words.items():
            back = self.marking.apply(self.values.images[name])
            if britton_reduce(self.graph, back) != britton_reduce(self.graph, w):
                bad.append(f"marking/values not mutually inverse at {name}")
        return bad


def reference_marked(graph: GbsGraph, tree, base: str) -> MarkedGraph:
    pres = Presentation(graph, tree, base)
    ident = identity_hom(pres)
    return MarkedGraph(pres, pres, ident, ident)


def transport(w: GroupWord, src: MarkedGraph, dst: MarkedGraph) -> GroupWord:
    """Rewrite a loop of src's presentation in dst's coordinates."""
    return dst.concretize(src.abstractify(w))


class Substitution(Hom):
    """Endomorphism of the reference coordinates (automorphisms, markings twists)."""

    def __init__(self, ref: Presentation, images: dict[str, GroupWord]):
        super().__init__(ref, ref, images)

    def iterate(self, w: GroupWord, n: int) -> GroupWord:
        for _ in range(n):
            w = self.apply(w)
        return w


def compose_subst(outer: Substitution, inner: Substitution) -> Substitution:
    return Substitution(outer.src, outer.compose(inner).images)


def twist(m: MarkedGraph, phi: Substitution, phi_inv: Substitution) -> MarkedGraph:
    """The point m.phi: same tree, marking precomposed with phi.

    Lengths satisfy ||g||_{m.phi} = ||phi(g)||_m, which is the whole point;
    the inverse substitution is needed to keep the reverse dictionary exact.
    """
    marking = Hom(m.ref, m.pres, {n: m.concretize(phi.images[n]) for n in phi.images})
    values = Hom(m.pres, m.ref, {n: phi_inv.apply(w) for n, w in m.values.images.items()})
    return MarkedGraph(m.pres, m.ref, marking, values)


def random_loop(pres: Presentation, rng, n_letters: int, max_exp: int = 3) -> GroupWord:
    """Seeded random loop at the base: a product of petals and vertex powers."""
    g = pres.graph
    names = sorted(pres.petal_words)
    pieces = []
    for _ in range(n_letters):
        name = names[rng.randrange(len(names))]
        k = rng.choice((-1, 1))
        if name.startswith("x_"):
            k *= rng.randint(1, max_exp)
        pieces.append(word_power(g, pres.petal_words[name], k))
    if not pieces:
        return GroupWord(pres.base)
    return britton_reduce(g, concat(g, *pieces))
