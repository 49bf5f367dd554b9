import random

import pytest
from hypothesis import given, settings, strategies as st

from gbsaxes.words import (axis_turns, britton_reduce, concat, cyclic_reduce,
                           cyclic_to_loop, inverse, is_elliptic, least_rotation,
                           translation_length, word_from_text, word_power,
                           word_to_text, words_equal, GroupWord)
from oracles import naive_reduce, random_path_word


def w(bs24, items, base="v"):
    return word_from_text(bs24.marked.graph, base, items)


def test_bs24_defining_relation(bs24):
    g = bs24.marked.graph
    assert word_to_text(britton_reduce(g, w(bs24, ["e", "v^2", "e~"]))) == ["v^4"]


def test_empty_word(bs24):
    g = bs24.marked.graph
    out = britton_reduce(g, GroupWord("v"))
    assert out.letters == ()


def test_reduce_matches_naive_oracle_sampled(bs24, rose3, ttex):
    rng = random.Random(2024)
    for ex in (bs24, rose3, ttex):
        g = ex.marked.graph
        for _ in range(800):
            word = random_path_word(g, rng, 12)
            assert britton_reduce(g, word) == naive_reduce(g, word, rng), word


def test_reduce_idempotent_sampled(ttex):
    rng = random.Random(5)
    g = ttex.marked.graph
    for _ in range(300):
        word = random_path_word(g, rng, 12)
        once = britton_reduce(g, word)
        assert britton_reduce(g, once) == once


@given(st.lists(st.integers(-10, 10), min_size=1, max_size=8), st.randoms())
@settings(max_examples=60, deadline=None)
def test_bs24_syllable_words_reduce_like_oracle(exps, rnd):
    from gbsaxes.corpus import bs24 as mk
    ex = mk()
    g = ex.marked.graph
    letters = []
    for i, k in enumerate(exps):
        letters.append(("s", "v", k))
        letters.append(("e", "e" if i % 2 == 0 else "e~"))
    word = GroupWord("v", tuple(letters))
    rng = random.Random(rnd.randint(0, 10**9))
    assert britton_reduce(g, word) == naive_reduce(g, word, rng)


def test_cyclic_reduce_conjugator_remultiplies(bs24):
    g = bs24.marked.graph
    word = w(bs24, ["v^1", "e", "v^-1"])
    cyc, conj = cyclic_reduce(g, word)
    assert not cyc.is_elliptic() and cyc.edges == ("e",)
    re = concat(g, conj, cyclic_to_loop(g, cyc), inverse(g, conj))
    assert words_equal(g, re, word)


def test_cyclic_reduce_remultiplies_randomly(ttex):
    g = ttex.marked.graph
    rng = random.Random(11)
    for _ in range(120):
        word = random_path_word(g, rng, 10, closed=True)
        cyc, conj = cyclic_reduce(g, word)
        re = concat(g, conj, cyclic_to_loop(g, cyc), inverse(g, conj))
        assert words_equal(g, re, word)


def test_already_cyclically_reduced_has_trivial_conjugator(bs24):
    g = bs24.marked.graph
    cyc, conj = cyclic_reduce(g, w(bs24, ["e"]))
    assert conj.letters == ()
    assert cyc.edges == ("e",)


def test_elliptic_conjugate_reduces_to_core(bs24):
    g = bs24.marked.graph
    cyc, conj = cyclic_reduce(g, w(bs24, ["e", "v^2", "e~"]))
    assert cyc.is_elliptic() and cyc.exponent == 4 and not cyc.edges


def test_translation_lengths_bs24(bs24):
    g = bs24.marked.graph
    assert translation_length(g, w(bs24, ["v^1"])) == 0.0
    assert translation_length(g, w(bs24, ["e"])) == pytest.approx(1.0)


def test_power_scales_translation_length(ttex):
    g = ttex.marked.graph
    rng = random.Random(23)
    done = 0
    while done < 12:
        word = random_path_word(g, rng, 8, closed=True)
        l1 = translation_length(g, word)
        if l1 == 0:
            continue
        for k in (2, 3, -2):
            assert translation_length(g, word_power(g, word, k)) == pytest.approx(abs(k) * l1)
        done += 1


def test_axis_turn_of_t_single_orbit(bs24):
    g = bs24.marked.graph
    turns = axis_turns(g, w(bs24, ["e"]))
    assert turns == {("v", (("e", 0), ("e~", 0))): 1}


def test_axis_turns_conjugation_invariant(ttex):
    g = ttex.marked.graph
    rng = random.Random(31)
    done = 0
    while done < 25:
        word = random_path_word(g, rng, 8, closed=True)
        if is_elliptic(g, word):
            continue
        h = random_path_word(g, rng, 6, base=word.base, closed=True)
        hw = concat(g, h, word, inverse(g, h))
        assert axis_turns(g, word) == axis_turns(g, hw)
        done += 1


def test_axis_turns_of_square_double(ttex):
    g = ttex.marked.graph
    rng = random.Random(37)
    done = 0
    while done < 15:
        word = random_path_word(g, rng, 8, closed=True)
        if is_elliptic(g, word):
            continue
        t1 = axis_turns(g, word)
        t2 = axis_turns(g, word_power(g, word, 2))
        assert set(t1) == set(t2)
        assert all(t2[k] == 2 * v for k, v in t1.items())
        done += 1


def test_least_rotation_matches_bruteforce():
    rng = random.Random(4)
    for _ in range(300):
        seq = [rng.randrange(5) for _ in range(rng.randint(1, 12))]
        i = least_rotation(seq)
        rots = [tuple(seq[j:] + seq[:j]) for j in range(len(seq))]
        assert tuple(seq[i:] + seq[:i]) == min(rots)


def test_text_roundtrip(ttex):
    g = ttex.marked.graph
    rng = random.Random(8)
    for _ in range(50):
        word = random_path_word(g, rng, 10)
        again = word_from_text(g, word.base, word_to_text(word))
        assert again == word


def test_negative_labels_reduce_like_oracle():
    from gbsaxes.core import build_graph
    g = build_graph(["v"], [("e", "v", "v", -4, 2, 1.0)])   # t a^2 t^-1 = a^-4
    out = britton_reduce(g, word_from_text(g, "v", ["e", "v^2", "e~"]))
    assert word_to_text(out) == ["v^-4"]
    rng = random.Random(12)
    from oracles import naive_reduce, random_path_word
    for _ in range(400):
        w = random_path_word(g, rng, 10)
        assert britton_reduce(g, w) == naive_reduce(g, w, rng)
