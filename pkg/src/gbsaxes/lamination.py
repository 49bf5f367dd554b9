"""Leaf-segment libraries for the stable/unstable laminations.

The stable lamination is the closure of iterated edge images; a library
holds the tightened words [f^k(e)] for k up to a depth cap, indexed for
subword matching.  Segments are compared through translation-invariant
token strings: oriented edge orbits alternating with canonical turn keys,
which is the "up to the action of G" matching of leaf segments.
"""

from __future__ import annotations

import hashlib
import pickle
from dataclasses import dataclass

import numpy as np

from .core import GbsError
from .traintrack import TrainTrackMap
from .words import (CyclicWord, GroupWord, cyclic_reduce, direction_count,
                    inverse, turn_key)

MAX_INDEXED_EDGES = 512


def primitivity_exponent(a: np.ndarray) -> int:
    n = a.shape[0]
    b = (a > 0).astype(np.int64)
    p = b.copy()
    k = 1
    while not (p > 0).all():
        p = np.minimum(p @ b, 1)
        k += 1
        if k > (n - 1) ** 2 + 1:
            raise GbsError("matrix not primitive")
    return k


def path_tokens(tt: TrainTrackMap, w: GroupWord) -> tuple:
    """Alternating (edge, turn-key) token string of a reduced path."""
    g = tt.graph
    edges = [lt for lt in w.letters if lt[0] == "e"]
    if not edges:
        return ()
    toks: list = []
    prev = None
    pending = 0
    for lt in w.letters:
        if lt[0] == "s":
            pending = lt[2]
            continue
        if prev is not None:
            toks.append(turn_key(g, (g.reverse(prev), 0),
                                 (lt[1], pending % direction_count(g, lt[1]))))
        toks.append(lt[1])
        prev = lt[1]
        pending = 0
    return tuple(toks)


def cyclic_tokens(tt: TrainTrackMap, c: CyclicWord, doubled: bool = True) -> tuple:
    g = tt.graph
    n = len(c.edges)
    reps = 2 if doubled else 1
    toks: list = []
    for j in range(reps * n):
        i = j % n
        toks.append(c.edges[i])
        if j < reps * n - 1:
            nxt = c.edges[(i + 1) % n]
            toks.append(turn_key(g, (g.reverse(c.edges[i]), 0),
                                 (nxt, c.residues[i] % direction_count(g, nxt))))
    return tuple(toks)


@dataclass
class Piece:
    start_edge: int        # edge index on the fundamental domain
    n_edges: int
    length: float


class LeafLibrary:
    """Iterated edge images of one train track map, indexed for matching."""

    def __init__(self, tt: TrainTrackMap, k_max: int = 8):
        if k_max < 2:
            raise GbsError("leaf_library: need k_max >= 2")
        self.tt = tt
        self.k_max = k_max
        self.prim_exponent = primitivity_exponent(tt.matrix)
        g = tt.graph
        self.entries: dict[tuple[str, int], GroupWord] = {}
        for e in g.forward:
            w = GroupWord(g.origin(e), (("e", e),))
            self.entries[(e, 0)] = w
            for k in range(1, k_max + 1):
                w = tt.f_reduced(w)
                self.entries[(e, k)] = w
        self.tokens: dict[tuple, tuple] = {}
        for key, w in self.entries.items():
            toks = path_tokens(tt, w)
            toks_rev = path_tokens(tt, inverse(g, w))
            self.tokens[key] = self._cap(toks)
            self.tokens[key + ("rev",)] = self._cap(toks_rev)
        self._automaton: SuffixAutomaton | None = None

    def automaton(self) -> "SuffixAutomaton":
        if self._automaton is None:
            sam = SuffixAutomaton()
            for toks in self.deepest():
                sam.add_word(toks)
            self._automaton = sam
        return self._automaton

    @staticmethod
    def _cap(toks: tuple) -> tuple:
        n_edges = (len(toks) + 1) // 2
        if n_edges <= MAX_INDEXED_EDGES:
            return toks
        drop = (n_edges - MAX_INDEXED_EDGES) // 2
        return toks[2 * drop: 2 * drop + 2 * MAX_INDEXED_EDGES - 1]

    def deepest(self) -> list[tuple]:
        return [self.tokens[(e, self.k_max)] for e in self.tt.graph.forward] + \
               [self.tokens[(e, self.k_max, "rev")] for e in self.tt.graph.forward]

    def crossed_turn_pairs(self):
        """Direction pairs crossed by the leaves (for Whitehead graphs)."""
        seen = set()
        out = []
        g = self.tt.graph
        for (e, k), w in self.entries.items():
            for d1, d2 in self.tt.path_turn_pairs(w):
                key = turn_key(g, d1, d2)
                if key not in seen:
                    seen.add(key)
                    out.append((d1, d2))
        return out

    def contains_translate(self, haystack_key, needle_key) -> bool:
        return _subseq(self.tokens[haystack_key], self.tokens[needle_key])

    def quasiperiodicity_defects(self) -> list[tuple]:
        """Pairs (deep entry, shallow entry) where the minimality containment
        gen-K ⊇ translate of gen-(K - prim_exponent) fails; ideally empty."""
        bad = []
        k0 = self.k_max - self.prim_exponent
        if k0 < 0:
            raise GbsError("k_max smaller than the primitivity exponent")
        for e in self.tt.graph.forward:
            for e0 in self.tt.graph.forward:
                if not self.contains_translate((e, self.k_max), (e0, k0)):
                    bad.append(((e, self.k_max), (e0, k0)))
        return bad

    def cache_key(self) -> str:
        h = hashlib.sha256()
        for e in sorted(self.tt.images):
            h.update(e.encode())
            h.update(repr(self.tt.images[e].letters).encode())
        h.update(str(self.k_max).encode())
        return h.hexdigest()[:16]


class SuffixAutomaton:
    """Suffix automaton over hashable tokens; answers longest-factor queries."""

    def __init__(self):
        self.nxt: list[dict] = [{}]
        self.link = [-1]
        self.length = [0]
        self.last = 0
        self._sep = 0

    def _add_state(self, length: int, link: int, nxt: dict) -> int:
        self.nxt.append(nxt)
        self.link.append(link)
        self.length.append(length)
        return len(self.nxt) - 1

    def extend(self, token) -> None:
        cur = self._add_state(self.length[self.last] + 1, 0, {})
        p = self.last
        while p >= 0 and token not in self.nxt[p]:
            self.nxt[p][token] = cur
            p = self.link[p]
        if p == -1:
            self.link[cur] = 0
        else:
            q = self.nxt[p][token]
            if self.length[p] + 1 == self.length[q]:
                self.link[cur] = q
            else:
                clone = self._add_state(self.length[p] + 1, self.link[q],
                                        dict(self.nxt[q]))
                while p >= 0 and self.nxt[p].get(token) == q:
                    self.nxt[p][token] = clone
                    p = self.link[p]
                self.link[q] = self.link[cur] = clone
        self.last = cur

    def add_word(self, toks) -> None:
        """Words are separated by sentinels so factors never straddle them."""
        self._sep += 1
        self.extend(("#sep", self._sep))
        for t in toks:
            self.extend(t)

    def match_lengths(self, query) -> list[int]:
        """For each position j, the longest factor of the corpus ending at j."""
        out = []
        p, length = 0, 0
        for t in query:
            while p and t not in self.nxt[p]:
                p = self.link[p]
                length = self.length[p]
            if t in self.nxt[p]:
                p = self.nxt[p][t]
                length += 1
            else:
                p, length = 0, 0
            out.append(length)
        return out

    def contains(self, toks) -> bool:
        p = 0
        for t in toks:
            if t not in self.nxt[p]:
                return False
            p = self.nxt[p][t]
        return True


def _subseq(hay: tuple, needle: tuple) -> bool:
    if not needle:
        return True
    n, m = len(hay), len(needle)
    first = needle[0]
    for i in range(n - m + 1):
        if hay[i] == first and hay[i:i + m] == needle:
            return True
    return False


def leaf_library(tt: TrainTrackMap, k_max: int = 8) -> LeafLibrary:
    return LeafLibrary(tt, k_max)


def max_runs(axis_cyc: CyclicWord, lib: LeafLibrary) -> list[int]:
    """runs[i]: edges of leaf segment starting at axis edge i (capped at n)."""
    toks = cyclic_tokens(lib.tt, axis_cyc, doubled=True)
    ends = lib.automaton().match_lengths(toks)
    n = len(axis_cyc.edges)
    starts = [0] * len(toks)
    for j, l in enumerate(ends):
        if l > 0 and starts[j - l + 1] < l:
            starts[j - l + 1] = l
    # a factor starting at i-1 yields its suffix starting at i
    best = list(starts)
    for i in range(1, len(toks)):
        cand = best[i - 1] - 1
        if cand > best[i]:
            best[i] = cand
    return [min((best[2 * i] + 1) // 2, n) for i in range(n)]


def detect_pieces(axis: CyclicWord | GroupWord, lib: LeafLibrary, min_len: float) -> list[Piece]:
    """Maximal disjoint leaf segments of PF length >= min_len on one period."""
    tt = lib.tt
    g = tt.graph
    if isinstance(axis, GroupWord):
        axis = cyclic_reduce(g, axis)[0]
    if axis.is_elliptic():
        raise GbsError("detect_pieces: elliptic axis")
    runs = max_runs(axis, lib)
    n = len(axis.edges)
    lens = [g.length(e) for e in axis.edges]

    def span_len(i: int, k: int) -> float:
        return sum(lens[(i + j) % n] for j in range(k))

    cands = []
    for i in range(n):
        k = runs[i]
        if k and span_len(i, k) >= min_len:
            cands.append(Piece(i, k, span_len(i, k)))
    # greedy disjointification, longest first
    cands.sort(key=lambda p: (-p.length, p.start_edge))
    used = [False] * n
    out = []
    for p in cands:
        idxs = [(p.start_edge + j) % n for j in range(p.n_edges)]
        if any(used[i] for i in idxs):
            continue
        for i in idxs:
            used[i] = True
        out.append(p)
    return sorted(out, key=lambda p: p.start_edge)


def lamination_ratio(axis: CyclicWord | GroupWord, lib: LeafLibrary, min_len: float,
                     max_cuts: int = 16) -> float:
    """LR: best fraction of the fundamental domain covered by disjoint leaf
    segments of length >= min_len (interval-scheduling DP over cut points)."""
    tt = lib.tt
    g = tt.graph
    if isinstance(axis, GroupWord):
        axis = cyclic_reduce(g, axis)[0]
    if axis.is_elliptic():
        raise GbsError("lamination_ratio: elliptic axis")
    runs = max_runs(axis, lib)
    n = len(axis.edges)
    lens = [g.length(e) for e in axis.edges]
    total = sum(lens)
    if min_len <= 0:
        return 1.0

    def linear_best(offset: int) -> float:
        ln = [lens[(offset + i) % n] for i in range(n)]
        rn = [min(runs[(offset + i) % n], n - i) for i in range(n)]
        pre = [0.0] * (n + 1)
        for i in range(n):
            pre[i + 1] = pre[i] + ln[i]
        dp = [0.0] * (n + 1)
        for j in range(1, n + 1):
            dp[j] = dp[j - 1]
            for i in range(j):
                if j - i <= rn[i]:
                    seg = pre[j] - pre[i]
                    if seg >= min_len and dp[i] + seg > dp[j]:
                        dp[j] = dp[i] + seg
        return dp[n]

    cuts = range(n) if n <= max_cuts else range(0, n, max(1, n // max_cuts))
    best = max(linear_best(c) for c in cuts)
    return min(1.0, best / total)


def _close_up(tt: TrainTrackMap, w: GroupWord) -> GroupWord:
    """Close a path into a based loop along the spanning tree."""
    from .words import britton_reduce, concat, end_vertex, inverse
    g = tt.graph
    pres = tt.domain.pres
    at = end_vertex(g, w)
    tau_b = pres.tree_path[w.base]
    tau_a = pres.tree_path[at]
    loop = britton_reduce(g, concat(g, w, inverse(g, tau_a), tau_b))
    return britton_reduce(g, concat(g, tau_b, loop, inverse(g, tau_b)))


def common_leaf_bound(lib_a: LeafLibrary, lib_b: LeafLibrary) -> float:
    """Longest lib_a-leaf segment found on realizations of lib_b's leaves.

    Deep lib_b entries are closed up into loxodromics, transported into
    lib_a's tree through the markings, and their axes searched against
    lib_a's index.  A finite bound reflects that the laminations differ;
    the closure junction only adds segments, never hides them.
    """
    tt_a, tt_b = lib_a.tt, lib_b.tt
    sam = lib_a.automaton()
    best = 0.0
    g = tt_a.graph
    for e in tt_b.graph.forward:
        w = lib_b.entries[(e, lib_b.k_max)]
        loop = _close_up(tt_b, w)
        abstract = tt_b.domain.abstractify(loop)
        realized = tt_a.domain.concretize(abstract)
        cyc, _ = cyclic_reduce(g, realized)
        if cyc.is_elliptic():
            continue
        toks = cyclic_tokens(tt_a, cyc, doubled=True)
        edge_pre = [0.0]
        for t in toks:
            edge_pre.append(edge_pre[-1] + (g.length(t) if isinstance(t, str) else 0.0))
        period = sum(g.length(x) for x in cyc.edges)
        for j, l in enumerate(sam.match_lengths(toks)):
            if l:
                best = max(best, min(period, edge_pre[j + 1] - edge_pre[j + 1 - l]))
    return best


def save_library(lib: LeafLibrary, path: str) -> None:
    with open(path, "wb") as fh:
        pickle.dump({"key": lib.cache_key(), "k_max": lib.k_max,
                     "entries": lib.entries}, fh)


def load_library(tt: TrainTrackMap, path: str) -> LeafLibrary:
    with open(path, "rb") as fh:
        data = pickle.load(fh)
    lib = LeafLibrary(tt, data["k_max"])
    if lib.cache_key() != data["key"]:
        raise GbsError("library cache does not match this map")
    return lib
