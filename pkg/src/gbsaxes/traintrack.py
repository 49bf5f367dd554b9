"""Train track representatives: PF metric, gates, legality, cancellation.

The map data is quotient-level: one decorated path per edge (the image of
the chosen lift, rebased at the image of its origin) and one rule per
vertex saying where the vertex group goes:  phi(x_v) = c_v x_w^mu c_v^-1.
The derivative map on directions is then

    Df(e, rho) = (first edge of image(e),  mu_{o(e)} * rho + first residue)

and gates are the eventual-coincidence classes of Df, computable as the
fibers of Df^{#directions} on the finite direction set.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import GbsError, GbsGraph
from .marked import MarkedGraph, Substitution
from .words import (CyclicWord, GroupWord, britton_reduce, concat, cyclic_reduce,
                    cyclic_to_loop, direction_count, elet, inverse, syl,
                    turn_key, words_equal)

Direction = tuple[str, int]     # (oriented edge id, residue mod origin index)


class NonPrimitiveError(GbsError):
    pass


@dataclass
class Constants:
    lam: float
    bcc: float
    c_f: float
    kappa: float


@dataclass
class MapReport:
    ok: bool
    violations: list[str]


def char_poly_coeffs(a: np.ndarray) -> list[int]:
    """det(xI - A) by Faddeev-LeVerrier, exact over the integers."""
    n = a.shape[0]
    m = [[Fraction(int(x)) for x in row] for row in a]
    coeffs = [Fraction(1)]
    mk = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        mk[i][i] = Fraction(1)
    for k in range(1, n + 1):
        am = [[sum(m[i][l] * mk[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        c = -sum(am[i][i] for i in range(n)) / k
        coeffs.append(c)
        mk = [[am[i][j] + (c if i == j else 0) for j in range(n)] for i in range(n)]
    return [int(c) for c in coeffs]


def pf_eigen(a: np.ndarray, tol: float = 1e-12) -> tuple[float, np.ndarray]:
    """Perron-Frobenius eigenvalue and positive left eigenvector of a primitive matrix.

    Power iteration on (A + I)^T; if the residual stalls, falls back to
    bisection on the (exact) characteristic polynomial for the eigenvalue,
    then one linear solve for the eigenvector.
    """
    n = a.shape[0]
    at = a.T.astype(float) + np.eye(n)
    v = np.ones(n) / n
    lam = 0.0
    for _ in range(200000):
        w = at @ v
        lam = float(v @ w)        # Rayleigh quotient for A^T + I
        v = w / np.linalg.norm(w)
        if np.linalg.norm(at @ v - lam * v, np.inf) <= tol * max(1.0, lam):
            break
    lam_a = lam - 1.0
    resid = np.linalg.norm(a.T @ v - lam_a * v, np.inf)
    if resid > tol * max(1.0, lam_a):
        coeffs = char_poly_coeffs(a)

        def p(x: float) -> float:
            acc = 0.0
            for c in coeffs:
                acc = acc * x + c
            return acc

        hi = float(max(a.sum(axis=0).max(), a.sum(axis=1).max())) + 1.0
        lo = hi
        while p(lo) > 0 and lo > 1e-12:
            lo *= 0.5
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if p(mid) > 0:
                hi = mid
            else:
                lo = mid
        lam_a = 0.5 * (lo + hi)
        mat = a.T.astype(float) - lam_a * np.eye(n)
        # eigenvector by one inverse-iteration step
        v = np.linalg.lstsq(mat + 1e-14 * np.eye(n), v, rcond=None)[0]
        v = np.abs(v)
        v /= np.linalg.norm(v)
    v = np.abs(v)
    return lam_a, v / v.sum()


def is_primitive(a: np.ndarray) -> bool:
    """Some power strictly positive; exponent capped at (n-1)^2 + 1 (Wielandt)."""
    n = a.shape[0]
    b = (a > 0).astype(np.int64)
    p = b.copy()
    for _ in range((n - 1) ** 2 + 1):
        if (p > 0).all():
            return True
        p = np.minimum(p @ b, 1)
    return bool((p > 0).all())


class TrainTrackMap:
    """A self-map of a marked graph, linear on edges, encoding an automorphism."""

    def __init__(self, domain: MarkedGraph, edge_images: dict[str, GroupWord],
                 vertex_rules: dict[str, tuple[str, int, GroupWord]],
                 phi: Substitution, tol: float = 1e-12, normalize: bool = True):
        self.phi = phi
        self.tol = tol
        g = domain.graph
        self.vertex_rules = vertex_rules
        self.fvert = {v: rule[0] for v, rule in vertex_rules.items()}
        self.mult = {v: rule[1] for v, rule in vertex_rules.items()}
        self.images: dict[str, GroupWord] = {}
        for e, w in edge_images.items():
            self.images[e] = britton_reduce(g, w)
            self.images[g.reverse(e)] = britton_reduce(g, inverse(g, w))

        self.matrix = self._transition_matrix(g)
        if not is_primitive(self.matrix):
            raise NonPrimitiveError("transition matrix is not primitive")
        self.lam, vec = pf_eigen(self.matrix, tol)
        if normalize:
            lengths = {e: float(vec[i]) for i, e in enumerate(g.forward)}
            self.domain = domain.with_graph(g.with_lengths(lengths))
        else:
            self.domain = domain
        self._dirs = self._directions()
        self._gate_of = self._gates()
        self._constants: Constants | None = None

    # -- structure ---------------------------------------------------------

    def _transition_matrix(self, g: GbsGraph) -> np.ndarray:
        idx = {e: i for i, e in enumerate(g.forward)}
        for e in g.forward:
            idx[g.reverse(e)] = idx[e]
        n = len(g.forward)
        a = np.zeros((n, n), dtype=np.int64)
        for j, e in enumerate(g.forward):
            for lt in self.images[e].letters:
                if lt[0] == "e":
                    a[idx[lt[1]], j] += 1
        return a

    @property
    def graph(self) -> GbsGraph:
        return self.domain.graph

    def _directions(self) -> list[Direction]:
        g = self.graph
        out = []
        for e in g.edges:
            for rho in range(direction_count(g, e)):
                out.append((e, rho))
        return out

    def df(self, d: Direction) -> Direction:
        g = self.graph
        e, rho = d
        img = self.images[e]
        lead, first = 0, None
        for lt in img.letters:
            if lt[0] == "s":
                lead = lt[2]
            else:
                first = lt[1]
                break
        if first is None:
            raise GbsError(f"degenerate image of {e}")
        m = direction_count(g, first)
        return (first, (self.mult[g.origin(e)] * rho + lead) % m)

    def _gates(self) -> dict[Direction, Direction]:
        """Fiber labels of Df^{#dirs}: directions with equal label share a gate."""
        cur = {d: d for d in self._dirs}
        for _ in range(len(self._dirs)):
            cur = {d: self.df(cur[d]) for d in cur}
        return cur

    def gates_at(self, v: str) -> list[list[Direction]]:
        groups: dict[Direction, list[Direction]] = {}
        for d in self._dirs:
            if self.graph.origin(d[0]) == v:
                groups.setdefault(self._gate_of[d], []).append(d)
        return [sorted(g) for g in groups.values()]

    def gate_structure(self) -> dict[str, list[list[Direction]]]:
        return {v: self.gates_at(v) for v in self.graph.vertices}

    def turn_is_legal(self, d1: Direction, d2: Direction) -> bool:
        """Same gate (or a degenerate pair) means illegal."""
        if d1 == d2:
            return False
        return self._gate_of[d1] != self._gate_of[d2]

    # -- path machinery ------------------------------------------------------

    def f_path(self, w: GroupWord) -> GroupWord:
        """Raw image of a decorated path, before tightening."""
        letters: list = []
        for lt in w.letters:
            if lt[0] == "s":
                k = self.mult[lt[1]] * lt[2]
                if k:
                    letters.append(syl(self.fvert[lt[1]], k))
            else:
                letters.extend(self.images[lt[1]].letters)
        return GroupWord(self.fvert[w.base], tuple(letters))

    def f_reduced(self, w: GroupWord) -> GroupWord:
        return britton_reduce(self.graph, self.f_path(w))

    def iterate_tighten(self, w: GroupWord, n: int) -> GroupWord:
        for _ in range(n):
            w = self.f_reduced(w)
        return w

    def f_cyclic(self, c: CyclicWord, n: int = 1) -> CyclicWord:
        for _ in range(n):
            loop = cyclic_to_loop(self.graph, c)
            c = cyclic_reduce(self.graph, self.f_path(loop))[0]
        return c

    # -- turns crossed -------------------------------------------------------

    def path_turn_pairs(self, w: GroupWord) -> list[tuple[Direction, Direction]]:
        g = self.graph
        out = []
        prev = None
        pending = 0
        for lt in w.letters:
            if lt[0] == "s":
                pending = lt[2]
                continue
            if prev is not None:
                d_in = (g.reverse(prev), 0)
                d_out = (lt[1], pending % direction_count(g, lt[1]))
                out.append((d_in, d_out))
            prev = lt[1]
            pending = 0
        return out

    def cyclic_turn_pairs(self, c: CyclicWord) -> list[tuple[Direction, Direction]]:
        g = self.graph
        out = []
        n = len(c.edges)
        for i in range(n):
            nxt = c.edges[(i + 1) % n]
            out.append(((g.reverse(c.edges[i]), 0),
                        (nxt, c.residues[i] % direction_count(g, nxt))))
        return out

    def illegal_turn_count(self, w: GroupWord | CyclicWord) -> int:
        pairs = (self.cyclic_turn_pairs(w) if isinstance(w, CyclicWord)
                 else self.path_turn_pairs(britton_reduce(self.graph, w)))
        return sum(1 for d1, d2 in pairs if not self.turn_is_legal(d1, d2))

    def turn_orbit_trace(self, d1: Direction, d2: Direction):
        """Canonical-key trace of a turn under Df until the orbit re-enters itself.

        Returns (list of keys, re-entry index).
        """
        g = self.graph
        seen: dict[tuple, int] = {}
        trace = []
        while True:
            key = turn_key(g, d1, d2)
            if key in seen:
                return trace, seen[key]
            seen[key] = len(trace)
            trace.append(key)
            d1, d2 = self.df(d1), self.df(d2)

    # -- train track verdict ---------------------------------------------------

    def crossed_turn_closure(self) -> list[tuple[Direction, Direction]]:
        """Turns crossed by the edge images together with their forward Df-orbits."""
        g = self.graph
        seen: set[tuple] = set()
        out = []
        stack = []
        for e in g.forward:
            stack.extend(self.path_turn_pairs(self.images[e]))
        while stack:
            d1, d2 = stack.pop()
            key = turn_key(g, d1, d2)
            if key in seen:
                continue
            seen.add(key)
            out.append((d1, d2))
            stack.append((self.df(d1), self.df(d2)))
        return out

    def verdict(self) -> tuple[bool, list[str]]:
        problems = []
        for v in self.graph.vertices:
            if len(self.gates_at(v)) < 2:
                problems.append(f"fewer than two gates at {v}")
        for d1, d2 in self.crossed_turn_closure():
            if not self.turn_is_legal(d1, d2):
                problems.append(f"illegal turn in the image orbit: {d1} {d2}")
        return not problems, problems

    def is_train_track(self) -> bool:
        return self.verdict()[0]

    # -- constants ----------------------------------------------------------

    def _metric_len(self, w: GroupWord) -> float:
        g = self.graph
        return sum(g.length(lt[1]) for lt in w.letters if lt[0] == "e")

    def turn_orbit_reps(self) -> list[tuple[Direction, Direction]]:
        g = self.graph
        reps = {}
        by_vertex: dict[str, list[Direction]] = {}
        for d in self._dirs:
            by_vertex.setdefault(g.origin(d[0]), []).append(d)
        for v, ds in by_vertex.items():
            for i in range(len(ds)):
                for j in range(i + 1, len(ds)):
                    key = turn_key(g, ds[i], ds[j])
                    reps.setdefault(key, (ds[i], ds[j]))
        return list(reps.values())

    def turn_cancellation(self, d1: Direction, d2: Direction) -> float:
        """Metric loss when f straightens a 2-edge path across this turn."""
        g = self.graph
        (e1, r1), (e2, r2) = d1, d2
        w = GroupWord(g.terminus(e1), (elet(g.reverse(e1)),
                                       syl(g.origin(e1), r2 - r1), elet(e2)))
        raw = self.f_path(w)
        tight = britton_reduce(g, raw)
        return 0.5 * (self._metric_len(raw) - self._metric_len(tight))

    def constants(self, bcc_override: float | None = None) -> Constants:
        """Cancellation constants; BCC stands in for BBT unless overridden
        with an externally computed bound (BCC <= BBT, so thresholds shrink)."""
        if bcc_override is not None:
            c_f = 2.0 * bcc_override / (self.lam - 1.0)
            return Constants(self.lam, bcc_override, c_f, 2.0 * c_f)
        if self._constants is None:
            bcc = 0.0
            for d1, d2 in self.turn_orbit_reps():
                bcc = max(bcc, self.turn_cancellation(d1, d2))
            c_f = 2.0 * bcc / (self.lam - 1.0)
            self._constants = Constants(self.lam, bcc, c_f, 2.0 * c_f)
        return self._constants

    # -- legality -------------------------------------------------------------

    def legality_ratio(self, c: CyclicWord) -> float:
        """LEG: fraction of an illegal-turn-aligned fundamental domain covered
        by maximal legal runs of length >= kappa; 1 when the axis is legal."""
        if c.is_elliptic():
            raise GbsError("legality_ratio: elliptic element")
        g = self.graph
        pairs = self.cyclic_turn_pairs(c)
        flags = [self.turn_is_legal(d1, d2) for d1, d2 in pairs]
        if all(flags):
            return 1.0
        kappa = self.constants().kappa
        total = sum(g.length(e) for e in c.edges)
        n = len(c.edges)
        illegal = [i for i, ok in enumerate(flags) if not ok]
        covered = 0.0
        for a, b in zip(illegal, illegal[1:] + [illegal[0] + n]):
            run = sum(g.length(c.edges[(i + 1) % n]) for i in range(a, b))
            if run >= kappa:
                covered += run
        return covered / total

    def legality_of_word(self, w: GroupWord) -> float:
        return self.legality_ratio(cyclic_reduce(self.graph, w)[0])

    # -- validation -----------------------------------------------------------

    def validate(self) -> MapReport:
        """Homomorphism + endpoint consistency of edge images with vertex rules."""
        g = self.graph
        dom = self.domain
        bad = list(self.phi.validate())

        def phi_dom(w: GroupWord) -> GroupWord:
            return dom.concretize(self.phi.apply(dom.abstractify(w)))

        pres = dom.pres
        for v, (tgt, mu, c_v) in self.vertex_rules.items():
            lhs = phi_dom(pres.petal_words[pres.vertex_petals[v]])
            core = GroupWord(tgt, (syl(tgt, mu),))
            tau = pres.tree_path[tgt]
            rhs = concat(g, c_v, tau, core, inverse(g, tau), inverse(g, c_v))
            if not words_equal(g, lhs, rhs):
                bad.append(f"vertex rule at {v} disagrees with phi")
        for e in g.forward:
            img = self.images[e]
            if not any(lt[0] == "e" for lt in img.letters):
                bad.append(f"degenerate image of edge {e}")
                continue
            if img.base != self.fvert[g.origin(e)]:
                bad.append(f"image of {e} based at {img.base}, expected f({g.origin(e)})")
            end = g.origin(e)
            # element identity: g(P_e) = c_o^-1 . phi(gamma_e) . c_t
            tau_o, tau_t = pres.tree_path[g.origin(e)], pres.tree_path[g.terminus(e)]
            gamma = concat(g, tau_o, GroupWord(g.origin(e), (elet(e),)), inverse(g, tau_t))
            tau_fo = pres.tree_path[self.fvert[g.origin(e)]]
            tau_ft = pres.tree_path[self.fvert[g.terminus(e)]]
            lhs = concat(g, tau_fo, img, inverse(g, tau_ft))
            c_o = self.vertex_rules[g.origin(e)][2]
            c_t = self.vertex_rules[g.terminus(e)][2]
            rhs = concat(g, inverse(g, c_o), phi_dom(gamma), c_t)
            if not words_equal(g, lhs, rhs):
                bad.append(f"edge image of {e} inconsistent with phi at endpoints")
        for e in g.forward:
            want = self.lam * g.length(e)
            got = self._metric_len(self.images[e])
            if abs(got - want) > 1e-9 * max(1.0, want):
                bad.append(f"metric not stretched by lambda on {e}")
        return MapReport(not bad, bad)


def random_legal_cyclic(tt: TrainTrackMap, rng, n_edges: int, tries: int = 200) -> CyclicWord:
    """A cyclically legal loop sampled by a legal-turn walk (used as test stock)."""
    g = tt.graph
    for _ in range(tries):
        e0 = g.forward[rng.randrange(len(g.forward))]
        edges = [e0]
        residues = []
        ok = True
        for _ in range(n_edges - 1):
            cur = edges[-1]
            cands = []
            for nxt in g.edges_at(g.terminus(cur)):
                for r in range(direction_count(g, nxt)):
                    if tt.turn_is_legal((g.reverse(cur), 0), (nxt, r)):
                        cands.append((nxt, r))
            if not cands:
                ok = False
                break
            nxt, r = cands[rng.randrange(len(cands))]
            residues.append(r)
            edges.append(nxt)
        if not ok or g.terminus(edges[-1]) != g.origin(edges[0]):
            continue
        closes = []
        for r in range(direction_count(g, edges[0])):
            if tt.turn_is_legal((g.reverse(edges[-1]), 0), (edges[0], r)):
                closes.append(r)
        if not closes:
            continue
        residues.append(closes[rng.randrange(len(closes))])
        c = CyclicWord(tuple(edges), tuple(residues))
        if tt.illegal_turn_count(c) == 0:
            return c
    raise GbsError("could not sample a legal loop")
