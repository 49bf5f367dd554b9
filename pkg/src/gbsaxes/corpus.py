"""Bundled example graphs, markings and train track maps.

Three marked graphs ship with the package:

* ``bs24`` — the Baumslag-Solitar group BS(2,4) as a single loop with
  labels (2,4); the stable letter conjugates a^2 to a^4.
* ``rose3`` — the rank-3 example <u,r,s,t | ru^n r^-1 = su^n s^-1 =
  tu^n t^-1 = u> as a rose with three (n,1)-labelled loops.
* ``traintrack`` — the same group presented on a two-vertex graph with a
  loop ``a`` and three parallel edges ``b``, ``e``, ``f``, carrying the
  fully irreducible automorphism

      u -> u,  r -> s,  s -> t,  t -> r s t s^-1 t^-1

  together with train track maps for it and for its inverse (which is the
  same map with the roles of r and t swapped).
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import GbsGraph, build_graph
from .marked import MarkedGraph, Substitution, reference_marked, twist
from .traintrack import TrainTrackMap
from .words import GroupWord, britton_reduce, concat, elet, inverse, syl


@dataclass
class Example:
    name: str
    marked: MarkedGraph
    aliases: dict[str, GroupWord]          # friendly generator names -> abstract words


@dataclass
class TrainTrackExample(Example):
    phi: Substitution
    phi_inv: Substitution
    tt_plus: TrainTrackMap
    tt_minus: TrainTrackMap


def bs24() -> Example:
    g = build_graph(["v"], [("e", "v", "v", 4, 2, 1.0)])
    m = reference_marked(g, [], "v")
    aliases = {"a": m.pres.petal_words["x_v"], "t": m.pres.petal_words["t_e"]}
    return Example("bs24", m, aliases)


def rose3(n: int = 2) -> Example:
    specs = [(eid, "v", "v", 1, n, 1.0) for eid in ("er", "es", "et")]
    g = build_graph(["v"], specs)
    m = reference_marked(g, [], "v")
    p = m.pres.petal_words
    aliases = {"u": p["x_v"], "r": p["t_er"], "s": p["t_es"], "t": p["t_et"]}
    return Example("rose3", m, aliases)


def _tt_graph(n: int) -> GbsGraph:
    return build_graph(["v", "x"], [
        ("a", "v", "v", 1, n, 1.0),
        ("b", "v", "x", 1, n, 1.0),
        ("e", "v", "x", 1, 1, 1.0),
        ("f", "v", "x", n, 1, 1.0),
    ])


def traintrack(n: int = 2) -> TrainTrackExample:
    g = _tt_graph(n)
    m = reference_marked(g, ["e"], "v")
    pres = m.pres

    def w(items) -> GroupWord:
        return britton_reduce(g, pres.loop(items))

    u = w([syl("v", 1)])
    r = w([elet("a")])
    s = w([elet("e"), elet("f~")])
    t = w([elet("b"), elet("e~")])
    aliases = {"u": u, "r": r, "s": s, "t": t}

    def prod(*ws) -> GroupWord:
        return britton_reduce(g, concat(g, *ws))

    inv = lambda x: inverse(g, x)
    phi = Substitution(pres, {
        "x_v": u, "x_x": u,
        "t_a": s,                             # r -> s
        "t_b": prod(r, s, t, inv(s), inv(t)),  # t -> r s t s^-1 t^-1
        "t_f": inv(t),                        # s^-1 -> t^-1
    })
    phi_inv = Substitution(pres, {
        "x_v": u, "x_x": u,
        "t_a": prod(t, s, r, inv(s), inv(r)),  # r -> t s r s^-1 r^-1
        "t_b": s,                              # t -> s
        "t_f": inv(r),                         # s^-1 -> r^-1
    })
    delta = Substitution(pres, {               # swaps r and t, fixes u and s
        "x_v": u, "x_x": u,
        "t_a": t,
        "t_b": r,
        "t_f": inv(s),
    })

    images = {
        "a": GroupWord("v", (elet("e"), elet("f~"))),
        "b": GroupWord("v", (elet("a"), elet("e"), elet("f~"),
                             elet("b"), elet("e~"), elet("f"))),
        "e": GroupWord("v", (elet("b"),)),
        "f": GroupWord("v", (elet("e"),)),
    }
    rules = {
        "v": ("v", 1, GroupWord("v")),
        "x": ("x", n, t),
    }
    tt_plus = TrainTrackMap(m, images, rules, phi)
    minus_domain = twist(m, delta, delta)
    tt_minus = TrainTrackMap(minus_domain, images, rules, phi_inv)
    return TrainTrackExample("traintrack", m, aliases, phi, phi_inv, tt_plus, tt_minus)


EXAMPLES = {"bs24": bs24, "rose3": rose3, "traintrack": traintrack}


def load(name: str, n: int = 2):
    if name not in EXAMPLES:
        raise KeyError(f"unknown example {name!r}; have {sorted(EXAMPLES)}")
    fn = EXAMPLES[name]
    return fn(n) if name != "bs24" else fn()
