"""Words in fundamental groupoids of graphs of cyclic groups.

A GroupWord is an edge path in the quotient graph decorated with vertex
syllables ``x_v^k``: alternating syllable/edge-letter data starting and
ending (possibly) with syllables.  Loops at a vertex represent group
elements; open words represent groupoid elements (decorated tree paths).

Britton's lemma drives everything: crossing an edge ``e`` conjugates the
edge-group image at the terminus into the one at the origin,

    e . x_{t(e)}^{k*label(e)} . rev(e)  =  x_{o(e)}^{k*label(rev e)}

and pushing multiples of ``label(rev e)`` through ``e`` left-to-right gives
the unique Bass-Serre coset normal form.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lcm

from .core import GbsError, GbsGraph

# letters: ("s", vertex, exponent) or ("e", edge_id)
Letter = tuple


def syl(v: str, k: int) -> Letter:
    return ("s", v, k)


def elet(eid: str) -> Letter:
    return ("e", eid)


@dataclass(frozen=True)
class GroupWord:
    base: str
    letters: tuple[Letter, ...] = ()

    def is_identity_word(self) -> bool:
        return not self.letters

    def __len__(self) -> int:
        return len(self.letters)


class MalformedWord(GbsError):
    pass


def check_word(g: GbsGraph, w: GroupWord) -> str:
    """Validate adjacency; return the end vertex."""
    if w.base not in g.vertices:
        raise MalformedWord(f"base vertex {w.base!r} not in graph")
    at = w.base
    for lt in w.letters:
        if lt[0] == "s":
            if lt[1] != at:
                raise MalformedWord(f"syllable at {lt[1]!r} but path is at {at!r}")
        elif lt[0] == "e":
            e = g.edge(lt[1])
            if e.origin != at:
                raise MalformedWord(f"edge {lt[1]!r} leaves {e.origin!r} but path is at {at!r}")
            at = e.terminus
        else:
            raise MalformedWord(f"bad letter {lt!r}")
    return at


def end_vertex(g: GbsGraph, w: GroupWord) -> str:
    at = w.base
    for lt in w.letters:
        if lt[0] == "e":
            at = g.edge(lt[1]).terminus
    return at


def concat(g: GbsGraph, *ws: GroupWord) -> GroupWord:
    """Concatenate paths; each must start where the previous one ends."""
    ws = [w for w in ws if w is not None]
    if not ws:
        raise GbsError("concat of nothing")
    at = end_vertex(g, ws[0])
    letters = list(ws[0].letters)
    for w in ws[1:]:
        if w.base != at:
            raise MalformedWord(f"concat: path ends at {at!r}, next starts at {w.base!r}")
        letters.extend(w.letters)
        at = end_vertex(g, w)
    return GroupWord(ws[0].base, tuple(letters))


def inverse(g: GbsGraph, w: GroupWord) -> GroupWord:
    out = []
    for lt in reversed(w.letters):
        if lt[0] == "s":
            out.append(("s", lt[1], -lt[2]))
        else:
            out.append(("e", g.reverse(lt[1])))
    return GroupWord(end_vertex(g, w), tuple(out))


def word_power(g: GbsGraph, w: GroupWord, n: int) -> GroupWord:
    if end_vertex(g, w) != w.base:
        raise MalformedWord("powers need a loop")
    if n == 0:
        return GroupWord(w.base)
    base = w if n > 0 else inverse(g, w)
    return GroupWord(base.base, base.letters * abs(n))


# -- Britton reduction and Bass-Serre normal form ----------------------------

def _push_syllable(stack: list[Letter], v: str, k: int) -> None:
    if k == 0 and stack and stack[-1][0] == "s":
        return
    if stack and stack[-1][0] == "s" and stack[-1][1] == v:
        k += stack.pop()[2]
    if k != 0:
        stack.append(("s", v, k))


def _reduce_pinches(g: GbsGraph, base: str, letters) -> list[Letter]:
    """Remove every subword e.x^{m}.rev(e) with label(e) | m (stack pass)."""
    stack: list[Letter] = []
    for lt in letters:
        if lt[0] == "s":
            _push_syllable(stack, lt[1], lt[2])
            continue
        eid = lt[1]
        # candidate pinch: [..., e', (syl m)?] with rev(e') == eid
        m = 0
        j = len(stack) - 1
        if j >= 0 and stack[j][0] == "s":
            m = stack[j][2]
            j -= 1
        if j >= 0 and stack[j][0] == "e" and g.reverse(stack[j][1]) == eid:
            prev = stack[j][1]
            lab = g.label(prev)
            if m % lab == 0:
                # e' . x^{k lab(e')} . rev(e') -> x^{k lab(rev e')}
                k = m // lab
                del stack[j:]
                _push_syllable(stack, g.origin(prev), k * g.label(g.reverse(prev)))
                continue
        stack.append(lt)
    return stack


def britton_reduce(g: GbsGraph, w: GroupWord) -> GroupWord:
    """Canonical form: pinch-free, exponents in coset residues before each edge.

    The left-to-right sweep pushes x^{q*label(rev e)} through e (it becomes
    x^{q*label(e)} on the far side), leaving a residue in [0, |label(rev e)|).
    Pinch-freeness is preserved because pushes only change syllables by
    multiples of the relevant labels.
    """
    check_word(g, w)
    stack = _reduce_pinches(g, w.base, w.letters)
    out: list[Letter] = []
    carry = 0          # exponent waiting at the current vertex
    at = w.base
    for lt in stack:
        if lt[0] == "s":
            carry += lt[2]
            continue
        eid = lt[1]
        lab_rev = g.label(g.reverse(eid))
        r = carry % abs(lab_rev)
        q = (carry - r) // lab_rev
        if r:
            out.append(("s", at, r))
        out.append(lt)
        at = g.terminus(eid)
        carry = q * g.label(eid)
    if carry:
        out.append(("s", at, carry))
    return GroupWord(w.base, tuple(out))


def words_equal(g: GbsGraph, a: GroupWord, b: GroupWord) -> bool:
    return britton_reduce(g, a) == britton_reduce(g, b)


def is_trivial(g: GbsGraph, w: GroupWord) -> bool:
    return not britton_reduce(g, w).letters


# -- cyclic words and conjugacy ----------------------------------------------

@dataclass(frozen=True)
class CyclicWord:
    """Cyclic Britton-reduced conjugacy data.

    Loxodromic: ``edges`` is the cyclic edge sequence and ``residues[i]`` the
    syllable exponent after ``edges[i]``.  Elliptic: ``edges`` is empty and
    the class is (a conjugate of) ``x_vertex^exponent``.
    """
    edges: tuple[str, ...]
    residues: tuple[int, ...]
    vertex: str | None = None
    exponent: int = 0

    def is_elliptic(self) -> bool:
        return not self.edges

    def n_edges(self) -> int:
        return len(self.edges)


def least_rotation(seq) -> int:
    """Index of the lexicographically minimal rotation (Booth's algorithm)."""
    n = len(seq)
    if n <= 1:
        return 0
    s = list(seq) + list(seq)
    f = [-1] * len(s)
    k = 0
    for j in range(1, len(s)):
        sj = s[j]
        i = f[j - k - 1]
        while i != -1 and sj != s[k + i + 1]:
            if sj < s[k + i + 1]:
                k = j - i - 1
            i = f[i]
        if sj != s[k + i + 1]:
            if sj < s[k]:
                k = j
            f[j - k] = -1
        else:
            f[j - k] = i + 1
    return k % n


def _pairs_to_letters(g: GbsGraph, pairs) -> list[Letter]:
    out: list[Letter] = []
    for eid, r in pairs:
        out.append(("e", eid))
        if r:
            out.append(("s", g.terminus(eid), r))
    return out


def cyclic_reduce(g: GbsGraph, w: GroupWord) -> tuple[CyclicWord, GroupWord]:
    """Return (cyclic class data, conjugator c) with w = c . cyclic . c^-1.

    The cyclic part is pinch-free around the wrap, carry-normalized and
    rotated to the lexicographically minimal representative; every
    rewriting step is mirrored in the conjugator, so re-multiplication
    recovers w exactly.
    """
    end = check_word(g, w)
    if end != w.base:
        raise MalformedWord("cyclic_reduce needs a loop")
    orig_base = w.base
    w = britton_reduce(g, w)
    conj: list[Letter] = []

    def conj_word() -> GroupWord:
        return britton_reduce(g, GroupWord(orig_base, tuple(conj)))

    while True:
        letters = list(w.letters)
        lead = 0
        if letters and letters[0][0] == "s":
            lead = letters[0][2]
            letters = letters[1:]
        if not letters:
            return CyclicWord((), (), w.base, lead), conj_word()
        edges = [lt[1] for lt in letters if lt[0] == "e"]
        residues = []
        for j, lt in enumerate(letters):
            if lt[0] != "e":
                continue
            r = letters[j + 1][2] if j + 1 < len(letters) and letters[j + 1][0] == "s" else 0
            residues.append(r)
        # w = x^lead . E : conjugating by x^lead moves it to the wrap junction
        if lead:
            conj.append(("s", w.base, lead))
            residues[-1] += lead

        n = len(edges)
        pinch = None
        for i in range(n):
            nxt = edges[(i + 1) % n]
            if g.reverse(edges[i]) == nxt and residues[i] % g.label(edges[i]) == 0:
                pinch = i
                break
        if pinch is None:
            break
        # rotate so the pinch junction sits between the last two letters,
        # then one linear reduction resolves it
        cut = (pinch + 2) % n
        pairs = list(zip(edges, residues))
        pre = _pairs_to_letters(g, pairs[:cut])
        post = _pairs_to_letters(g, pairs[cut:])
        conj.extend(pre)
        base = g.origin(edges[cut]) if cut < n else g.origin(edges[0])
        w = britton_reduce(g, GroupWord(base, tuple(post + pre)))

    # carry normalization; wrap pushes conjugate, interior pushes do not
    base = g.origin(edges[0])
    for _ in range(3):
        changed = False
        for i in range(n):
            nxt = edges[(i + 1) % n]
            lab_rev = g.label(g.reverse(nxt))
            r = residues[i] % abs(lab_rev)
            q = (residues[i] - r) // lab_rev
            if not q:
                continue
            changed = True
            residues[i] = r
            if i < n - 1:
                residues[i + 1] += q * g.label(nxt)
            else:
                conj.append(("s", base, -q * lab_rev))
                residues[0] += q * g.label(nxt)
        if not changed:
            break

    # canonical rotation (conjugate by the rotated-away prefix)
    pairs = list(zip(edges, residues))
    best_i = least_rotation(pairs)
    conj.extend(_pairs_to_letters(g, pairs[:best_i]))
    pairs = pairs[best_i:] + pairs[:best_i]
    e, r = zip(*pairs)
    return CyclicWord(tuple(e), tuple(r)), conj_word()


def cyclic_to_loop(g: GbsGraph, c: CyclicWord) -> GroupWord:
    """A based loop representing the class (starting at the origin of edges[0])."""
    if c.is_elliptic():
        if c.exponent == 0:
            return GroupWord(c.vertex)
        return GroupWord(c.vertex, (syl(c.vertex, c.exponent),))
    letters: list[Letter] = []
    for eid, r in zip(c.edges, c.residues):
        letters.append(("e", eid))
        if r:
            letters.append(("s", g.terminus(eid), r))
    return GroupWord(g.origin(c.edges[0]), tuple(letters))


def translation_length(g: GbsGraph, w: GroupWord | CyclicWord) -> float:
    """||g||: total length of the edges crossed by one period of the axis; 0 iff elliptic."""
    c = w if isinstance(w, CyclicWord) else cyclic_reduce(g, w)[0]
    return sum(g.length(e) for e in c.edges)


def is_elliptic(g: GbsGraph, w: GroupWord) -> bool:
    return cyclic_reduce(g, w)[0].is_elliptic()


# -- directions and turns ------------------------------------------------------

def direction_count(g: GbsGraph, eid: str) -> int:
    """Directions at o(e) in the orbit of e: the index |label(rev e)|."""
    return g.origin_index(eid)


def turn_key(g: GbsGraph, d1: tuple[str, int], d2: tuple[str, int]) -> tuple:
    """Canonical key of a turn: minimal over the diagonal vertex-group shift."""
    (e1, r1), (e2, r2) = d1, d2
    v = g.origin(e1)
    if g.origin(e2) != v:
        raise GbsError("turn: directions at different vertices")
    m1, m2 = direction_count(g, e1), direction_count(g, e2)
    best = None
    for s in range(lcm(m1, m2)):
        cand = tuple(sorted(((e1, (r1 + s) % m1), (e2, (r2 + s) % m2))))
        if best is None or cand < best:
            best = cand
    return (v, best)


def path_turns(g: GbsGraph, w: GroupWord) -> list[tuple]:
    """Turns crossed by a reduced path, one per interior junction."""
    w = britton_reduce(g, w)
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
            out.append(turn_key(g, d_in, d_out))
        prev = lt[1]
        pending = 0
    return out


def axis_turns(g: GbsGraph, w: GroupWord | CyclicWord) -> dict:
    """Multiset (as a dict) of turn keys crossed by one period of the axis."""
    c = w if isinstance(w, CyclicWord) else cyclic_reduce(g, w)[0]
    if c.is_elliptic():
        raise GbsError("axis_turns: element is elliptic")
    counts: dict[tuple, int] = {}
    n = len(c.edges)
    for i in range(n):
        nxt = c.edges[(i + 1) % n]
        d_in = (g.reverse(c.edges[i]), 0)
        d_out = (nxt, c.residues[i] % direction_count(g, nxt))
        k = turn_key(g, d_in, d_out)
        counts[k] = counts.get(k, 0) + 1
    return counts


# -- text form ---------------------------------------------------------------

def word_to_text(w: GroupWord) -> list[str]:
    out = []
    for lt in w.letters:
        if lt[0] == "s":
            out.append(f"{lt[1]}^{lt[2]}")
        else:
            out.append(lt[1])
    return out


def word_from_text(g: GbsGraph, base: str, items: list[str]) -> GroupWord:
    letters: list[Letter] = []
    at = base
    for it in items:
        if "^" in it:
            v, k = it.rsplit("^", 1)
            letters.append(("s", v, int(k)))
        else:
            letters.append(("e", it))
            at = g.terminus(it)
    w = GroupWord(base, tuple(letters))
    check_word(g, w)
    return w
