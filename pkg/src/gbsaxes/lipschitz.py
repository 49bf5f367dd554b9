"""Candidates and the Lipschitz metric between marked graphs.

The stretch Lip(a,b) = sup_g ||g||_b / ||g||_a is realized on candidates:
conjugacy classes whose axis projects to an embedded loop, figure eight,
barbell, or a barbell with one or both circles degenerated to a vertex
whose group properly contains the incident edge group.  The projection
constrains the image, not the turns, so every junction carries a
vertex-group decoration over the full coset range; at degenerate tips the
residue 0 would pinch and is dropped.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass

from .core import GbsError, GbsGraph
from .marked import MarkedGraph, random_loop
from .words import (CyclicWord, GroupWord, britton_reduce, concat, cyclic_reduce,
                    direction_count, elet, inverse, syl, translation_length)

SHAPES = ("loop", "figure-eight", "barbell", "singly-degenerate-barbell",
          "doubly-degenerate-barbell")


@dataclass
class Candidate:
    shape: str
    cyclic: CyclicWord            # in the host graph's coordinates
    abstract: GroupWord           # same class over the reference
    support: frozenset[str]       # unoriented (forward) edge ids crossed
    length: float


@dataclass
class LipschitzResult:
    lip: float
    d_lip: float
    witness: Candidate


def _unoriented(g: GbsGraph, eid: str) -> str:
    return eid if eid in g.forward else g.reverse(eid)


def _embedded_circles(g: GbsGraph) -> list[list[str]]:
    """Oriented simple cycles (distinct vertices, each unoriented edge once),
    up to rotation and reversal."""
    seen: set[tuple] = set()
    out: list[list[str]] = []

    def keyed(cycle: list[str]) -> tuple:
        variants = []
        for seq in (cycle, [g.reverse(e) for e in reversed(cycle)]):
            variants.extend(tuple(seq[i:] + seq[:i]) for i in range(len(seq)))
        return min(variants)

    def record(cycle: list[str]) -> None:
        k = keyed(cycle)
        if k not in seen:
            seen.add(k)
            out.append(list(cycle))

    def dfs(path: list[str], verts: set[str], used: set[str]) -> None:
        last = path[-1]
        for nxt in sorted(g.edges_at(g.terminus(last))):
            u = _unoriented(g, nxt)
            if u in used:
                continue
            t = g.terminus(nxt)
            if t == g.origin(path[0]):
                record(path + [nxt])
            elif t not in verts:
                dfs(path + [nxt], verts | {t}, used | {u})

    for e in sorted(g.edges):
        o, t = g.origin(e), g.terminus(e)
        if o == t:
            record([e])
        else:
            dfs([e], {o, t}, {_unoriented(g, e)})
    return out


def _simple_paths(g: GbsGraph) -> list[list[str]]:
    """Simple paths with distinct endpoints, plus single loop edges (for the
    degenerate barbells, whose segment may run around a loop)."""
    out: list[list[str]] = []

    def dfs(path: list[str], verts: set[str]) -> None:
        out.append(list(path))
        last = path[-1]
        for nxt in sorted(g.edges_at(g.terminus(last))):
            t = g.terminus(nxt)
            if t not in verts:
                dfs(path + [nxt], verts | {t})

    for e in sorted(g.edges):
        if g.origin(e) == g.terminus(e):
            out.append([e])
        else:
            dfs([e], {g.origin(e), g.terminus(e)})
    return out


def _cycle_vertices(g: GbsGraph, cycle: list[str]) -> set[str]:
    return {g.origin(e) for e in cycle}


def _path_letters(edges: list[str], residues: list[int], g: GbsGraph) -> list:
    letters = []
    for e, r in zip(edges, residues):
        letters.append(elet(e))
        if r:
            letters.append(syl(g.terminus(e), r))
    return letters


def _rotate_to(cycle: list[str], v: str, g: GbsGraph) -> list[str]:
    for i, e in enumerate(cycle):
        if g.origin(e) == v:
            return cycle[i:] + cycle[:i]
    raise GbsError("vertex not on cycle")


DECORATION_CAP = 60000     # per shape instance; exceeding it is a loud error


def _junction_ranges(g: GbsGraph, edges: list[str]):
    """Residue range at each cyclic junction; None when a pinch is forced.

    The axis may turn through any vertex-group translate, so every junction
    carries a decoration over the full coset range.  Where the next edge is
    the reverse of the current one (degenerate-barbell tips), residue 0 would
    pinch, so the range drops it; an empty range kills the shape (the vertex
    group must exceed the edge group there).
    """
    ranges = []
    n = len(edges)
    for i in range(n):
        nxt = edges[(i + 1) % n]
        if nxt == g.reverse(edges[i]):
            mod = abs(g.label(edges[i]))
            if mod < 2:
                return None
            ranges.append(range(1, mod))
        else:
            ranges.append(range(direction_count(g, nxt)))
    return ranges


def _emit_decorated(g: GbsGraph, shape: str, edges: list[str], out: list) -> None:
    ranges = _junction_ranges(g, edges)
    if ranges is None:
        return
    total = 1
    for r in ranges:
        total *= len(r)
    if total > DECORATION_CAP:
        raise GbsError(f"candidate decoration explosion ({total}) on shape "
                       f"{shape}; labels too large for exhaustive enumeration")
    for combo in itertools.product(*ranges):
        letters = []
        for e, r in zip(edges, combo):
            letters.append(elet(e))
            if r:
                letters.append(syl(g.terminus(e), r))
        out.append((shape, letters))


def enumerate_candidates(m: MarkedGraph) -> list[Candidate]:
    g = m.graph
    words: list[tuple[str, list]] = []    # (shape, letters of a loop word)

    circles = _embedded_circles(g)
    paths = _simple_paths(g)

    for c in circles:
        _emit_decorated(g, "loop", c, words)

    for i, c1 in enumerate(circles):
        v1 = _cycle_vertices(g, c1)
        for c2 in circles[i + 1:]:
            v2 = _cycle_vertices(g, c2)
            shared = v1 & v2
            if len(shared) != 1:
                continue
            if {_unoriented(g, e) for e in c1} & {_unoriented(g, e) for e in c2}:
                continue
            v = shared.pop()
            a = _rotate_to(c1, v, g)
            for b in (_rotate_to(c2, v, g),
                      _rotate_to([g.reverse(e) for e in reversed(c2)], v, g)):
                _emit_decorated(g, "figure-eight", a + b, words)

    for s in paths:
        u, v = g.origin(s[0]), g.terminus(s[-1])
        s_verts = {g.origin(e) for e in s} | {v}
        interior = s_verts - {u, v}
        sbar = [g.reverse(e) for e in reversed(s)]

        # full barbells: disjoint circles at both ends
        if u != v:
            for c1 in circles:
                cv1 = _cycle_vertices(g, c1)
                if u not in cv1 or (cv1 & s_verts) != {u}:
                    continue
                for c2 in circles:
                    cv2 = _cycle_vertices(g, c2)
                    if v not in cv2 or (cv2 & s_verts) != {v} or cv1 & cv2:
                        continue
                    if {_unoriented(g, e) for e in c1} & {_unoriented(g, e) for e in c2}:
                        continue
                    a = _rotate_to(c1, u, g)
                    for b in (_rotate_to(c2, v, g),
                              _rotate_to([g.reverse(e) for e in reversed(c2)], v, g)):
                        _emit_decorated(g, "barbell", a + s + b + sbar, words)

        # singly degenerate: circle at u, big vertex at v (tip range handles it)
        if u != v:
            for c1 in circles:
                cv1 = _cycle_vertices(g, c1)
                if u not in cv1 or (cv1 & s_verts) != {u}:
                    continue
                a = _rotate_to(c1, u, g)
                _emit_decorated(g, "singly-degenerate-barbell", a + s + sbar, words)

        # doubly degenerate: big vertices at both ends
        if not interior:
            _emit_decorated(g, "doubly-degenerate-barbell", s + sbar, words)

    # reduce, drop elliptics, dedupe up to conjugacy and inversion
    out: list[Candidate] = []
    seen: set = set()
    for shape, letters in words:
        base = g.origin(letters[0][1])
        w = GroupWord(base, tuple(letters))
        cyc, _ = cyclic_reduce(g, w)
        if cyc.is_elliptic():
            continue
        cyc_inv, _ = cyclic_reduce(g, inverse(g, w))
        key = (cyc.edges, cyc.residues)
        key_inv = (cyc_inv.edges, cyc_inv.residues)
        if key in seen or key_inv in seen:
            continue
        seen.update((key, key_inv))
        tau = m.pres.tree_path[base]
        based = britton_reduce(g, concat(g, tau, w, inverse(g, tau)))
        out.append(Candidate(
            shape, cyc, m.abstractify(based),
            frozenset(_unoriented(g, e) for e in cyc.edges),
            translation_length(g, cyc)))
    return out


def lipschitz_distance(a: MarkedGraph, b: MarkedGraph) -> LipschitzResult:
    """Lip(a,b) = max over candidates of a of the length ratio; d = log(Lip vol_a/vol_b)."""
    best = None
    best_ratio = 0.0
    for cand in enumerate_candidates(a):
        lb = b.abstract_length(cand.abstract)
        if lb == 0.0:
            raise GbsError(
                f"candidate {cand.shape} is elliptic in the target: "
                "trees are not in a common deformation space")
        ratio = lb / cand.length
        if ratio > best_ratio:
            best_ratio, best = ratio, cand
    if best is None:
        raise GbsError("no candidates: degenerate graph")
    d = math.log(best_ratio * a.graph.volume() / b.graph.volume())
    return LipschitzResult(best_ratio, d, best)


def sup_check_random(a: MarkedGraph, b: MarkedGraph, n: int, seed: int) -> float:
    """Empirical sup of ||g||_b/||g||_a over random classes (guards enumeration)."""
    rng = random.Random(seed)
    best = 0.0
    for _ in range(n):
        w = random_loop(a.pres, rng, rng.randint(2, 8))
        la = translation_length(a.graph, w)
        if la == 0.0:
            continue
        lb = b.abstract_length(a.abstractify(w))
        best = max(best, lb / la)
    return best
