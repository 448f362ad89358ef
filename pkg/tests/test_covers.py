import itertools

import pytest

from soficov import fixtures as fx
from soficov.covers import (EPPath, EventuallyPeriodicPoint, LeftTail, alpha, embed_theta,
                            fischer_cover, follower_of_tail, follower_set_graph,
                            is_follower_separated, is_irreducible, is_predecessor_separated,
                            is_regular_path, is_synchronizing_word, krieger_cover, path_along,
                            regular_vertices, synchronizing_path_to, underline_graph)
from soficov.errors import (CapExceededError, NotInShiftError, NotIrreducibleError,
                            PreconditionError)
from soficov.graph import (components, hereditary_closure, higher_block, parse_lg,
                           restrict_hereditary)
from soficov.invariants import graphs_isomorphic
from soficov.lang import contains_word, follower_includes, language_equal

import oracles

S = frozenset


def iso(g1, g2):
    return graphs_isomorphic(g1, g2) is not None


def edge_set(g):
    return set(g.edges)


def test_underline_matches_figures():
    for name in ("ex1", "ex2"):
        got = underline_graph(fx.load(name)).graph
        assert edge_set(got) == edge_set(fx.load(f"{name}_underline")), name


def test_underline_even_shift():
    u = underline_graph(fx.load("ev2")).graph
    assert set(u.vertices) == {"{a}", "{b}", "{a,b}"}
    assert ("{a,b}", "0", "{a,b}") in u.edges and ("{a,b}", "1", "{a}") in u.edges
    assert u.is_right_resolving


def test_underline_vertices_match_tail_enumeration(corpus):
    for name, g in corpus.items():
        cov = underline_graph(g)
        assert set(cov.provenance.values()) == oracles.tail_family(g, 6, 6), name


def test_underline_single_loop():
    g = parse_lg("x 0 x")
    assert edge_set(underline_graph(g).graph) == {("{x}", "0", "{x}")}


def test_krieger_even_shift():
    K = krieger_cover(fx.load("ev2")).graph
    assert (len(K.vertices), len(K.edges)) == (3, 5)
    assert iso(K, fx.load("ev3"))


def test_krieger_nr3_matches_figure():
    K = krieger_cover(fx.load("nr3")).graph
    assert (len(K.vertices), len(K.edges)) == (3, 8)
    assert iso(K, fx.load("nr3_krieger"))


def test_krieger_mx5_drops_word_class():
    fsg = follower_set_graph(fx.load("mx5")).graph
    assert len(fsg.vertices) == 7
    assert iso(fsg, fx.load("mx5_follower"))
    assert set(fx.load("mx5_follower").vertices) - regular_vertices(fx.load("mx5_follower")) == {"10"}
    K = krieger_cover(fx.load("mx5")).graph
    expected = restrict_hereditary(fx.load("mx5_follower"),
                                   set(fx.load("mx5_follower").vertices) - {"10"})
    assert len(K.vertices) == 6 and iso(K, expected)


def test_follower_set_graph_small():
    assert len(follower_set_graph(fx.load("ev2")).graph.vertices) == 3
    assert len(follower_set_graph(parse_lg("x 0 x")).graph.vertices) == 1


def test_follower_set_graph_classes_match_words(corpus):
    # vertices correspond to distinct follower sets of nonempty words (length-bounded check)
    for name in ("ev2", "ev4", "nr3", "ex1"):
        g = corpus[name]
        fsg = follower_set_graph(g).graph
        words = [w for w in oracles.path_words(g, 4) if w]
        classes = {frozenset(oracles.words_from_set(g, oracles.run(g, g.vertices, w), 6))
                   for w in words}
        assert len(fsg.vertices) == len(classes), name


def test_routes_agree(corpus, random_corpus):
    for g in list(corpus.values()) + random_corpus:
        assert iso(krieger_cover(g, "merge").graph, krieger_cover(g, "regular-part").graph)


def test_unknown_route():
    with pytest.raises(ValueError):
        krieger_cover(fx.load("ev2"), "other")


def test_krieger_presentation_independent(corpus):
    base = krieger_cover(corpus["ev2"]).graph
    assert iso(krieger_cover(corpus["ev4"]).graph, base)
    assert iso(krieger_cover(corpus["ev3"]).graph, base)
    for name in ("ev2", "nr3", "mx5", "ex1"):
        g = corpus[name]
        K = krieger_cover(g).graph
        for n in (2, 3):
            assert iso(krieger_cover(higher_block(g, n)).graph, K), (name, n)


def test_krieger_properties(corpus, random_corpus):
    for g in list(corpus.values()) + random_corpus[:80]:
        K = krieger_cover(g).graph
        assert K.is_right_resolving
        assert is_follower_separated(K)
        assert is_predecessor_separated(K)
        assert regular_vertices(K) == set(K.vertices)
        assert language_equal(K, g)


def test_regular_vertices_examples():
    assert regular_vertices(fx.load("nr3")) == {"b", "c"}
    assert regular_vertices(fx.load("ev3")) == {"a", "b", "c"}
    assert regular_vertices(fx.load("ev4")) == {"a", "b", "c", "d"}


def test_regular_vertices_hereditary(corpus, random_corpus):
    for g in list(corpus.values()) + random_corpus:
        if not g.is_right_resolving:
            continue
        reg = regular_vertices(g)
        assert hereditary_closure(g, reg) == reg


def test_regular_vertices_match_tail_oracle(corpus, random_corpus):
    # v regular iff some tail D contains v and every u in D has f(u) within f(v)
    for g in [g for g in corpus.values() if g.is_right_resolving] + random_corpus[:40]:
        langs = {v: oracles.path_words(g, 8, v) for v in g.vertices}
        expected = {v for D in oracles.tail_family(g, 5, 5) for v in D
                    if all(langs[u] <= langs[v] for u in D)}
        assert regular_vertices(g) == expected


def ev3_path(left, trans, right):
    g = fx.load("ev3")
    return EPPath(g, tuple(left), tuple(trans), tuple(right))


def test_is_regular_path_ev3():
    g = fx.load("ev3")
    two_cycle = ev3_path([("a", "0", "b"), ("b", "0", "a")], [], [("a", "0", "b"), ("b", "0", "a")])
    assert not is_regular_path(g, two_cycle)
    c_then_a = ev3_path([("c", "0", "c")], [("c", "1", "a")], [("a", "1", "a")])
    assert is_regular_path(g, c_then_a)
    a_loop = ev3_path([("a", "1", "a")], [], [("a", "1", "a")])
    assert is_regular_path(g, a_loop)


def test_is_regular_path_rejects_foreign_path():
    p = EPPath(fx.load("ev2"), (("a", "1", "a"),), (), (("a", "1", "a"),))
    with pytest.raises(PreconditionError):
        is_regular_path(fx.load("ev3"), p)


def test_follower_of_tail_examples():
    g = fx.load("ev2")
    assert follower_of_tail(g, LeftTail("1"))[0] == S("a")
    assert follower_of_tail(g, LeftTail("0"))[0] == S("ab")
    assert follower_of_tail(g, LeftTail("1", "0"))[0] == S("b")
    with pytest.raises(NotInShiftError):
        follower_of_tail(g, LeftTail("1", "01"))


def test_follower_of_tail_matches_oracle(corpus):
    for name, g in corpus.items():
        for u in [w for w in oracles.path_words(g, 3) if w]:
            for w in sorted(oracles.path_words(g, 2)):
                D = oracles.tail_D(g, u, w)
                if not D:
                    continue
                got, k = follower_of_tail(g, LeftTail(u, w))
                assert got == D, name
                assert k in krieger_cover(g).graph.vertices


def test_alpha_even_shift():
    g = fx.load("ev2")
    K = krieger_cover(g).graph
    ones = alpha(g, EventuallyPeriodicPoint("1", "", "1"))
    assert {ones.vertex(i) for i in range(-3, 3)} == {"{a}"}
    zeros = alpha(g, EventuallyPeriodicPoint("0", "", "0"))
    assert {zeros.vertex(i) for i in range(-3, 3)} == {"{a,b}"}
    assert [e[1] for e in K.out_edges["{a,b}"]] == ["0", "1"]
    mixed = alpha(g, EventuallyPeriodicPoint("0", "", "1"))
    assert [mixed.vertex(i) for i in range(-2, 3)] == ["{a,b}", "{a,b}", "{a,b}", "{a}", "{a}"]
    with pytest.raises(NotInShiftError):
        alpha(g, EventuallyPeriodicPoint("1", "0", "1"))


def sample_points(g, limit=60):
    words = sorted(oracles.path_words(g, 3), key=lambda w: (len(w), w))
    nonempty = [w for w in words if w]
    out = []
    for u, w, v in itertools.product(nonempty, words, nonempty):
        if len(out) >= limit:
            break
        y = EventuallyPeriodicPoint(u, w, v)
        n = len(g.vertices) + 1
        if contains_word(g, y.window(-n * len(u), len(w) + n * len(v))):
            out.append(y)
    return out


def test_alpha_is_regular_section(corpus):
    for name, g in corpus.items():
        K = krieger_cover(g).graph
        pts = sample_points(g)
        assert len(pts) >= 50, name
        for y in pts:
            x = alpha(g, y)
            assert x.label().equivalent(y)
            assert is_regular_path(K, x)
            lo, hi = x.span
            for i in range(lo - 2, hi + 2):
                assert x.vertex(i) == follower_of_tail(g, y.left_tail(i))[1]


def test_fischer_examples():
    ev2 = fx.load("ev2")
    for name in ("ev2", "ev3", "ev4"):
        F = fischer_cover(fx.load(name)).graph
        assert (len(F.vertices), len(F.edges)) == (2, 3)
        assert iso(F, ev2)
    assert iso(fischer_cover(fx.load("mx5")).graph, fx.load("mx5"))


def test_fischer_is_terminal_component(corpus):
    for name, g in corpus.items():
        if not is_irreducible(g):
            continue
        F = fischer_cover(g).graph
        K = krieger_cover(g).graph
        dag = components(K)
        [term] = dag.terminal_components
        assert iso(F, restrict_hereditary(K, term)), name
        assert language_equal(F, g)
        assert len(components(F).components) == 1
        assert is_follower_separated(F)


def test_irreducibility():
    assert is_irreducible(fx.load("ev2"))
    assert is_irreducible(fx.load("mx5"))
    assert not is_irreducible(fx.load("nr3"))
    dag = components(krieger_cover(fx.load("nr3")).graph)
    # one terminal component, but it presents only the 1-loop shift
    assert [S(c) for c in dag.terminal_components] == [S({"{b}"})]
    with pytest.raises(NotIrreducibleError, match="proper subshift"):
        fischer_cover(fx.load("nr3"))


def oracle_synchronizing(g, w, n=5):
    words = oracles.path_words(g, n + len(w) + n)
    w = tuple(w)
    short = [x for x in words if len(x) <= n]
    for u in short:
        if u + w not in words:
            continue
        for v in short:
            if w + v in words and u + w + v not in words:
                return False
    return True


def test_synchronizing_words_even_shift():
    for name in ("ev2", "ev4"):
        g = fx.load(name)
        assert is_synchronizing_word(g, "1") and oracle_synchronizing(g, "1")
        assert not is_synchronizing_word(g, "0") and not oracle_synchronizing(g, "0")
    with pytest.raises(NotInShiftError):
        is_synchronizing_word(fx.load("ev2"), "101")


def test_synchronizing_words_match_oracle(corpus):
    for name in ("ev2", "nr3", "ex1", "mx5"):
        g = corpus[name]
        for w in sorted(oracles.path_words(g, 3)):
            if w:
                assert is_synchronizing_word(g, w) == oracle_synchronizing(g, w, 4), (name, w)


def test_synchronizing_path_to():
    g = fx.load("ev2")
    assert path_along(g, "a", "1") == synchronizing_path_to(g, "a")
    p = synchronizing_path_to(g, "b")
    assert "".join(e[1] for e in p) == "10" and p[-1][2] == "b"
    mx5 = fx.load("mx5")
    for v in mx5.vertices:
        p = synchronizing_path_to(mx5, v)
        assert p[-1][2] == v
        assert is_synchronizing_word(mx5, [e[1] for e in p])


def test_synchronizing_path_depth_exhausted():
    with pytest.raises(CapExceededError):
        synchronizing_path_to(fx.load("mx5"), "a", depth=1)


def test_embed_theta_examples():
    ev2 = fx.load("ev2")
    th = embed_theta(ev2)
    assert th.is_homomorphism() and th.is_injective
    img = th.image
    assert len(img) == 2 and hereditary_closure(th.codomain, img) == img
    ev3 = fx.load("ev3")
    th3 = embed_theta(ev3)
    assert th3.is_injective and th3.is_homomorphism()
    th4 = embed_theta(fx.load("ev4"))
    a = th4.assignment
    assert not th4.is_injective and a["a"] == a["d"] and a["b"] == a["c"] and a["a"] != a["b"]
    with pytest.raises(PreconditionError):
        embed_theta(fx.load("nr3"))


def test_embed_theta_injective_iff_separated(corpus):
    for name, g in corpus.items():
        if not g.is_right_resolving or regular_vertices(g) != set(g.vertices):
            continue
        th = embed_theta(g)
        assert th.is_homomorphism()
        assert hereditary_closure(th.codomain, th.image) == th.image
        assert th.is_injective == is_follower_separated(g), name
        if th.is_injective:
            assert iso(g, restrict_hereditary(th.codomain, th.image))


def test_predecessor_separation():
    assert is_predecessor_separated(fx.load("ev3"))
    assert is_predecessor_separated(krieger_cover(fx.load("nr3")).graph)
    twins = parse_lg("r 0 x\nr 0 y\nx 1 r\ny 1 r\nr 2 r")
    assert not is_predecessor_separated(twins)


def test_predecessor_separation_matches_oracle(random_corpus):
    # equal backward word sets of bounded length as a necessary condition for non-separation
    for g in random_corpus[:60]:
        back = {v: frozenset(w for w in oracles.path_words(g, 6)
                             if oracles.run_back(g, {v}, w)) for v in g.vertices}
        if is_predecessor_separated(g):
            continue
        assert len(set(back.values())) < len(g.vertices)


def test_vertex_count_extremality(corpus):
    checked = 0
    for name, g in corpus.items():
        if not (g.is_right_resolving and is_follower_separated(g)
                and regular_vertices(g) == set(g.vertices)):
            continue
        K = krieger_cover(g).graph
        assert len(g.vertices) <= len(K.vertices), name
        assert (len(g.vertices) == len(K.vertices)) == iso(g, K), name
        checked += 1
    assert checked >= 5
