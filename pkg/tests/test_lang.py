import pytest
from hypothesis import given, settings, strategies as st

from soficov import fixtures as fx
from soficov.covers import underline_graph
from soficov.errors import CapExceededError, NotRightResolvingError, PreconditionError
from soficov.graph import higher_block, parse_lg
from soficov.invariants import graphs_isomorphic
from soficov.lang import (contains_word, dee_family, dee_witnesses, follower_includes,
                          follower_partition, image_of, language_equal, merged_graph,
                          relation_monoid, separating_word, subset_automaton, words_up_to)

import oracles

S = frozenset


def test_image_of_even_shift():
    ev2 = fx.load("ev2")
    assert image_of(ev2, {"a", "b"}, "0") == {"a", "b"}
    assert image_of(ev2, {"a", "b"}, "1") == {"a"}
    assert image_of(ev2, {"b"}, "") == {"b"}
    with pytest.raises(PreconditionError):
        image_of(ev2, {"a"}, "2")


def test_subset_automaton_even_shift():
    aut = subset_automaton(fx.load("ev2"))
    assert set(aut.states) == {S("ab"), S("a"), S("b")}
    assert aut.initial == S("ab")
    assert aut.step(S("b"), "1") is None


def test_subset_automaton_single_loop():
    aut = subset_automaton(parse_lg("x 0 x"))
    assert aut.states == (S("x"),)


def test_subset_automaton_mx5_counts_initial_state():
    # the full set is never an image of a nonempty word; the other 7 states are
    aut = subset_automaton(fx.load("mx5"))
    assert len(aut.states) == 8
    images = set(aut.transitions.values())
    assert len(images) == 7
    assert S("abcde") not in images


def test_contains_word_frozen_by_oracle():
    ev2 = fx.load("ev2")
    words = oracles.path_words(ev2, 3)
    assert (("0", "1", "0") in words, ("1", "0", "1") in words) == (True, False)
    assert contains_word(ev2, "010") is True
    assert contains_word(ev2, "101") is False
    assert contains_word(ev2, "") is True
    assert contains_word(ev2, "2") is False


def test_words_up_to_even_shift():
    ev2 = fx.load("ev2")
    assert words_up_to(ev2, 1) == [(), ("0",), ("1",)]
    assert words_up_to(ev2, 2) == [(), ("0",), ("0", "0"), ("0", "1"), ("1",), ("1", "0"),
                                   ("1", "1")]
    with pytest.raises(PreconditionError):
        words_up_to(ev2, 17)


def test_words_up_to_matches_path_enumeration(corpus):
    for g in corpus.values():
        got = words_up_to(g, 6)
        assert got == sorted(got)
        assert set(got) == oracles.path_words(g, 6)


def test_relation_monoid_even_shift():
    mon = relation_monoid(fx.load("ev2"))
    nonzero = [r for r in mon if not r.is_zero]
    assert ["".join(r.witness) for r in nonzero] == ["0", "1", "00", "01", "10", "010"]
    assert ["".join(r.witness) for r in nonzero if r.idempotent] == ["1", "00", "010"]
    zero = [r for r in mon if r.is_zero]
    assert ["".join(r.witness) for r in zero] == ["101"]
    r1 = nonzero[1]
    assert r1.pairs == {("a", "a")}
    assert nonzero[2].pairs == {("a", "a"), ("b", "b")}


def test_relation_monoid_ex1_idempotents():
    mon = {"".join(r.witness): r for r in relation_monoid(fx.load("ex1"))}
    assert mon["1"].idempotent and mon["1"].pairs == {("a", "a"), ("b", "a")}
    assert mon["1"].range == {"a"}
    assert mon["2"].idempotent and mon["2"].range == {"a", "b"}


def test_relation_monoid_single_loop():
    mon = relation_monoid(parse_lg("x 0 x"))
    assert len(mon) == 1 and mon[0].idempotent and mon[0].pairs == {("x", "x")}


def test_relation_monoid_matches_word_enumeration(corpus):
    for name, g in corpus.items():
        mon = relation_monoid(g)
        naive = oracles.naive_relations(g, 6)
        assert {r.pairs for r in mon} == set(naive), name
        for r in mon:
            assert r.witness == naive[r.pairs], name


def test_relation_composition_law():
    mon = relation_monoid(fx.load("mx5"))
    for r in mon[:10]:
        for s in mon[:10]:
            t = r.then(s)
            assert t.pairs == oracles_relation(fx.load("mx5"), t.witness)
            assert t.idempotent == (t.then(t).pairs == t.pairs)


def oracles_relation(g, word):
    return frozenset((v, d) for v in g.vertices for d in oracles.run(g, {v}, word))


def test_monoid_cap(monkeypatch):
    monkeypatch.setenv("SOFICOV_CAP", "3")
    g = parse_lg("a 0 b\nb 0 c\nc 0 a\na 1 a\nb 1 a")
    with pytest.raises(CapExceededError):
        relation_monoid(g)


def test_dee_family_examples():
    assert set(dee_family(fx.load("ev2"))) == {S("a"), S("b"), S("ab")}
    assert set(dee_family(fx.load("ex1"))) == {S("a"), S("b"), S("ab")}
    assert set(dee_family(fx.load("nr3"))) == {S("abc"), S("b"), S("c")}


def test_dee_family_matches_tail_enumeration(corpus):
    for name, g in corpus.items():
        assert set(dee_family(g)) == oracles.tail_family(g, 6, 6), name


def test_dee_witnesses_realize_members(corpus):
    for g in corpus.values():
        for D, (u, w) in dee_witnesses(g).items():
            assert oracles.tail_D(g, u, w) == D


def test_dee_family_transition_closed(corpus, random_corpus):
    for g in list(corpus.values()) + random_corpus:
        fam = set(dee_family(g))
        for D in fam:
            for a in g.alphabet:
                img = image_of(g, D, a)
                assert not img or img in fam


def test_follower_partition_examples():
    assert follower_partition(fx.load("ev3")).separated
    part = follower_partition(fx.load("ev4"))
    assert set(part.classes) == {S("ad"), S("bc")}
    under = follower_partition(underline_graph(fx.load("ex1")).graph)
    assert len(part.classes) == 2
    assert under.same("{a,b}", "{a}") and not under.same("{a}", "{b}")


def test_follower_partition_requires_right_resolving():
    with pytest.raises(NotRightResolvingError):
        follower_partition(parse_lg("a 0 b\na 0 a\nb 0 a"))


def test_follower_partition_matches_words(corpus):
    for g in corpus.values():
        if not g.is_right_resolving:
            continue
        part = follower_partition(g)
        langs = {v: frozenset(oracles.path_words(g, 8, v)) for v in g.vertices}
        for v in g.vertices:
            for w in g.vertices:
                assert part.same(v, w) == (langs[v] == langs[w])


def test_follower_includes_examples():
    ex1 = fx.load("ex1")
    assert follower_includes(ex1, "b", ex1, "a")
    assert not follower_includes(ex1, "a", ex1, "b")
    ev3 = fx.load("ev3")
    assert not follower_includes(ev3, "c", ev3, "a")
    for v in ev3.vertices:
        assert follower_includes(ev3, v, ev3, v)


def test_follower_includes_matches_words(corpus, random_corpus):
    graphs = [g for g in corpus.values() if g.is_right_resolving] + random_corpus[:60]
    for g in graphs:
        langs = {v: oracles.path_words(g, 10, v) for v in g.vertices}
        for v in g.vertices:
            for w in g.vertices:
                assert follower_includes(g, v, g, w) == (langs[v] <= langs[w])


def test_merged_graph_examples():
    ev3 = fx.load("ev3")
    merged, vm = merged_graph(ev3)
    assert merged == ev3 and vm.is_injective
    ex1 = fx.load("ex1")
    m2, vm2 = merged_graph(underline_graph(ex1).graph)
    assert graphs_isomorphic(m2, ex1) is not None
    assert vm2.is_homomorphism()
    m3, _ = merged_graph(fx.load("ev4"))
    assert graphs_isomorphic(m3, fx.load("ev2")) is not None


def test_merged_graph_is_separated(random_corpus):
    for g in random_corpus:
        merged, vm = merged_graph(g)
        assert merged.is_right_resolving
        assert follower_partition(merged).separated
        assert vm.is_homomorphism()
        assert set(vm.edge_assignment.values()) == set(merged.edges)


def test_language_equal_examples():
    ev2 = fx.load("ev2")
    assert language_equal(ev2, fx.load("ev3"))
    assert language_equal(ev2, fx.load("ev4"))
    loop = parse_lg("x 0 x")
    assert not language_equal(ev2, loop)
    assert separating_word(ev2, loop) == ("1",)


def test_language_equal_agrees_with_words(random_corpus):
    pairs = list(zip(random_corpus[:80], random_corpus[1:81]))
    for g1, g2 in pairs:
        eq = oracles.path_words(g1, 7) == oracles.path_words(g2, 7)
        if language_equal(g1, g2):
            assert eq
        w = separating_word(g1, g2)
        if w is not None:
            assert contains_word(g1, w) != contains_word(g2, w)


def test_words_agree_across_higher_block(corpus):
    for g in corpus.values():
        base = words_up_to(g, 6)
        for n in (2, 3):
            assert words_up_to(higher_block(g, n), 6) == base


@given(st.data())
@settings(max_examples=60, deadline=None)
def test_image_composes(data):
    g = data.draw(st.sampled_from(list(fx.all_fixtures().values())))
    S_ = data.draw(st.sets(st.sampled_from(g.vertices), min_size=1))
    u = data.draw(st.lists(st.sampled_from(g.alphabet), max_size=4))
    v = data.draw(st.lists(st.sampled_from(g.alphabet), max_size=4))
    assert image_of(g, S_, u + v) == image_of(g, image_of(g, S_, u), v)
    assert image_of(g, S_, u) == oracles.run(g, S_, u)
