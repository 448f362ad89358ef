"""Cover constructions: underline graph, Krieger future cover, follower set graph, Fischer cover.

Also hosts the finite handles on infinite objects used throughout: left tails
``u^∞ w``, eventually periodic points ``u^∞ w v^∞`` and eventually periodic
paths.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import lcm
from typing import Mapping, Sequence

from .errors import (CapExceededError, NotInShiftError, NotIrreducibleError,
                     PreconditionError)
from .graph import (Edge, LabeledGraph, VertexMap, components, render_subset,
                    restrict_hereditary, reverse)
from .lang import (MONOID_CAP, Word, as_word, contains_word, dee_family, follower_partition,
                   format_word, inclusion_relation, index, language_equal, merged_graph,
                   resolve_cap, subset_automaton, _require_no_sinks, _require_rr,
                   _subset_closure)

KINDS = ("krieger", "fischer", "follower-graph", "underline", "gprime", "double-subset")


@dataclass(frozen=True)
class Cover:
    """A presentation built from ``source`` together with what each vertex stands for.

    ``provenance`` maps a vertex name to a frozenset: of source vertices for
    subset-valued covers, or of subsets (merged classes) for quotient covers.
    """

    graph: LabeledGraph
    kind: str
    provenance: Mapping[str, frozenset] = field(compare=False, repr=False)
    source: LabeledGraph = field(compare=False, repr=False)

    def describe(self, v: str) -> str:
        members = self.provenance[v]
        if all(isinstance(m, frozenset) for m in members):
            return "{" + ",".join(sorted(render_subset(m) for m in members)) + "}"
        return render_subset(members)


# -- finite handles on infinite objects ----------------------------------------------------


@dataclass(frozen=True)
class LeftTail:
    """The left-infinite sequence u^∞ w."""

    u: Word
    w: Word = ()

    def __post_init__(self):
        object.__setattr__(self, "u", as_word(self.u))
        object.__setattr__(self, "w", as_word(self.w))
        if not self.u:
            raise PreconditionError("left period must be nonempty")


@dataclass(frozen=True)
class EventuallyPeriodicPoint:
    """The bi-infinite sequence u^∞ w v^∞; position 0 is the first letter after u^∞."""

    u: Word
    w: Word
    v: Word

    def __post_init__(self):
        for name in ("u", "w", "v"):
            object.__setattr__(self, name, as_word(getattr(self, name)))
        if not self.u or not self.v:
            raise PreconditionError("periods must be nonempty")

    @classmethod
    def from_parts(cls, u: Sequence[str], w: Sequence[str], v: Sequence[str],
                   origin: int = 0) -> "EventuallyPeriodicPoint":
        """Point whose transient ``w`` starts at position ``origin``."""
        u, w, v = as_word(u), as_word(w), as_word(v)
        if origin > 0:
            reps = origin // len(u) + 1
            w = (u * reps)[len(u) * reps - origin:] + w
        elif origin < 0:
            drop = -origin
            while len(w) < drop:
                w = w + v
            w = w[drop:]
        return cls(u, w, v)

    def letter(self, i: int) -> str:
        if i < 0:
            return self.u[i % len(self.u)]
        if i < len(self.w):
            return self.w[i]
        return self.v[(i - len(self.w)) % len(self.v)]

    def window(self, start: int, stop: int) -> Word:
        return tuple(self.letter(i) for i in range(start, stop))

    def left_tail(self, i: int = 0) -> LeftTail:
        """History strictly before position ``i``."""
        if i <= 0:
            return LeftTail(self.u, self.u[: i % len(self.u)] if i % len(self.u) else ())
        return LeftTail(self.u, self.window(0, i))

    def shift(self, i: int) -> "EventuallyPeriodicPoint":
        """The point σ^i(y)."""
        return EventuallyPeriodicPoint.from_parts(self.u, self.w, self.v, -i)

    def equivalent(self, other: "EventuallyPeriodicPoint") -> bool:
        """Equality as bi-infinite sequences."""
        left = lcm(len(self.u), len(other.u))
        right = max(len(self.w), len(other.w)) + lcm(len(self.v), len(other.v))
        return self.window(-left, right) == other.window(-left, right)

    def __str__(self):
        return f"({format_word(self.u)})^inf {format_word(self.w)} ({format_word(self.v)})^inf"


@dataclass(frozen=True)
class EPPath:
    """Eventually periodic bi-infinite path ``left_cycle^∞ transient right_cycle^∞``.

    The transient starts at position ``origin``.
    """

    host: LabeledGraph = field(repr=False, compare=False)
    left_cycle: tuple[Edge, ...]
    transient: tuple[Edge, ...]
    right_cycle: tuple[Edge, ...]
    origin: int = 0

    def __post_init__(self):
        if not self.left_cycle or not self.right_cycle:
            raise PreconditionError("path cycles must be nonempty")
        edges = set(self.host.edges)
        seq = list(self.left_cycle) + list(self.transient) + list(self.right_cycle)
        for e in seq:
            if e not in edges:
                raise PreconditionError(f"edge {e} not in host graph")
        for e, f in zip(seq, seq[1:]):
            if e[2] != f[0]:
                raise PreconditionError(f"edges {e} and {f} do not compose")
        for cyc in (self.left_cycle, self.right_cycle):
            if cyc[-1][2] != cyc[0][0]:
                raise PreconditionError("cycle is not closed")

    def edge(self, i: int) -> Edge:
        j = i - self.origin
        if j < 0:
            return self.left_cycle[j % len(self.left_cycle)]
        if j < len(self.transient):
            return self.transient[j]
        return self.right_cycle[(j - len(self.transient)) % len(self.right_cycle)]

    def vertex(self, i: int) -> str:
        """Source vertex of the edge at position ``i``."""
        return self.edge(i)[0]

    def label(self) -> EventuallyPeriodicPoint:
        return EventuallyPeriodicPoint.from_parts(
            tuple(e[1] for e in self.left_cycle), tuple(e[1] for e in self.transient),
            tuple(e[1] for e in self.right_cycle), self.origin)

    @property
    def span(self) -> tuple[int, int]:
        """Positions covering one left period, the transient and one right period."""
        return (self.origin - len(self.left_cycle),
                self.origin + len(self.transient) + len(self.right_cycle))


def path_along(g: LabeledGraph, start: str, word: Sequence[str]) -> tuple[Edge, ...]:
    """The unique path from ``start`` labeled ``word`` in a right-resolving graph."""
    out = []
    v = start
    for a in word:
        d = g.successor(v, a)
        if d is None:
            raise NotInShiftError(f"no {a}-edge leaves {v}")
        out.append((v, a, d))
        v = d
    return tuple(out)


# -- covers ------------------------------------------------------------------------


def _require_trim(g: LabeledGraph):
    if not g.is_trim:
        raise PreconditionError("graph is not trim")


@lru_cache(maxsize=128)
def underline_graph(g: LabeledGraph) -> Cover:
    """Graph on the sets D^y with edges D -a-> [D,a]."""
    _require_trim(g)
    ix = index(g)
    family = dee_family(g)
    edges = []
    for D in family:
        m = ix.mask(D)
        for a in g.alphabet:
            t = ix.step(m, a)
            if t:
                edges.append((render_subset(D), a, render_subset(ix.members(t))))
    graph = LabeledGraph.from_edges(edges, vertices=(render_subset(D) for D in family),
                                    alphabet=g.alphabet)
    return Cover(graph, "underline", {render_subset(D): D for D in family}, g)


def _quotient_cover(base: Cover, kind: str) -> tuple[Cover, VertexMap]:
    merged, vmap = merged_graph(base.graph)
    prov: dict[str, set] = {v: set() for v in merged.vertices}
    for v, k in vmap.assignment.items():
        prov[k].add(base.provenance[v])
    return Cover(merged, kind, {k: frozenset(s) for k, s in prov.items()}, base.source), vmap


@lru_cache(maxsize=128)
def _krieger_merge(g: LabeledGraph) -> tuple[Cover, VertexMap]:
    return _quotient_cover(underline_graph(g), "krieger")


@lru_cache(maxsize=128)
def follower_set_graph(g: LabeledGraph) -> Cover:
    """Follower classes of nonempty words, with the induced letter transitions."""
    _require_trim(g)
    aut = subset_automaton(g)
    nonempty = {t for (_, _), t in aut.transitions.items()}
    graph = aut.to_graph(nonempty)
    base = Cover(graph, "follower-graph", {render_subset(s): s for s in nonempty}, g)
    cover, _ = _quotient_cover(base, "follower-graph")
    return cover


@lru_cache(maxsize=128)
def krieger_cover(g: LabeledGraph, route: str = "merge") -> Cover:
    if route == "merge":
        return _krieger_merge(g)[0]
    if route == "regular-part":
        fsg = follower_set_graph(g)
        keep = regular_vertices(fsg.graph)
        graph = restrict_hereditary(fsg.graph, keep)
        return Cover(graph, "krieger", {v: fsg.provenance[v] for v in graph.vertices}, g)
    raise ValueError(f"unknown route {route!r}")


def regular_vertices(g: LabeledGraph) -> frozenset[str]:
    """Vertices v whose follower set is F(y) for some left-infinite history ending at v.

    v is regular iff some D in the D^y family contains v and every member of D
    has a follower set included in f(v).
    """
    _require_rr(g)
    _require_no_sinks(g)
    incl = inclusion_relation(g)
    out = set()
    for D in dee_family(g):
        for v in D:
            if v not in out and all((u, v) in incl for u in D):
                out.add(v)
    return frozenset(out)


def _left_stable(g: LabeledGraph, u: Sequence[str]) -> int:
    return index(g).stable_image(u)


def is_regular_path(g: LabeledGraph, x: EPPath) -> bool:
    """Whether f(t(x_(-∞,k])) = F(σ^{k+1}(label x)) for every k."""
    _require_rr(g)
    if x.host != g:
        raise PreconditionError("path does not live in this graph")
    ix = index(g)
    incl = inclusion_relation(g)

    def ok(mask: int, v: str) -> bool:
        return all((u, v) in incl for u in ix.members(mask))

    y = x.label()
    start, _ = x.span
    tail = y.left_tail(start)
    D = ix.image(_left_stable(g, tail.u), tail.w)
    pos = start
    stop = x.origin + len(x.transient)
    period = len(x.right_cycle)
    seen = set()
    while True:
        if pos >= stop and (pos - stop) % period == 0:
            if D in seen:
                return True
            seen.add(D)
        if not ok(D, x.vertex(pos)):
            return False
        D = ix.step(D, y.letter(pos))
        pos += 1


def follower_of_tail(g: LabeledGraph, t: LeftTail) -> tuple[frozenset[str], str]:
    """D^{u^∞ w} and the Krieger vertex standing for its follower set."""
    ix = index(g)
    D = ix.image(_left_stable(g, t.u), t.w)
    if not D:
        raise NotInShiftError("left tail labels no left-infinite path")
    cover, vmap = _krieger_merge(g)
    return ix.members(D), vmap[render_subset(ix.members(D))]


def alpha(g: LabeledGraph, y: EventuallyPeriodicPoint) -> EPPath:
    """The path through the Krieger cover whose vertex at i is the class of σ^i(y)."""
    K = krieger_cover(g).graph
    _, start = follower_of_tail(g, LeftTail(y.u, ()))
    left = path_along(K, start, y.u)
    trans = list(path_along(K, start, y.w))
    v = trans[-1][2] if trans else start
    boundaries = [v]
    while True:
        seg = path_along(K, v, y.v)
        v = seg[-1][2]
        if v in boundaries:
            k = boundaries.index(v)
            break
        boundaries.append(v)
    for b in boundaries[:k]:
        trans.extend(path_along(K, b, y.v))
    right = []
    for b in boundaries[k:]:
        right.extend(path_along(K, b, y.v))
    # membership of the right tail: every vertex on the path must be a real D^y class
    ix = index(g)
    D = ix.image(_left_stable(g, y.u), y.w)
    seen = set()
    while D not in seen:
        if not D:
            raise NotInShiftError(f"{y} is not in the shift")
        seen.add(D)
        D = ix.image(D, y.v)
    if not D:
        raise NotInShiftError(f"{y} is not in the shift")
    return EPPath(K, left, tuple(trans), tuple(right))


@lru_cache(maxsize=128)
def fischer_cover(g: LabeledGraph) -> Cover:
    """The unique terminal component of the Krieger cover."""
    K = krieger_cover(g)
    dag = components(K.graph)
    terms = dag.terminal_components
    if len(terms) != 1:
        raise NotIrreducibleError(f"Krieger cover has {len(terms)} terminal components")
    sub = restrict_hereditary(K.graph, terms[0])
    if not language_equal(sub, g):
        raise NotIrreducibleError("terminal component presents a proper subshift")
    return Cover(sub, "fischer", {v: K.provenance[v] for v in sub.vertices}, g)


def is_irreducible(g: LabeledGraph) -> bool:
    try:
        fischer_cover(g)
    except NotIrreducibleError:
        return False
    return True


@lru_cache(maxsize=128)
def _automaton_classes(g: LabeledGraph):
    aut = subset_automaton(g)
    graph = aut.to_graph()
    part = follower_partition(graph)
    return aut, {s: part.class_of[render_subset(s)] for s in aut.states}


def is_synchronizing_word(g: LabeledGraph, w: str | Sequence[str]) -> bool:
    """Whether uw, wv in the language imply uwv in the language."""
    word = as_word(w)
    if not contains_word(g, word):
        raise NotInShiftError(f"word {word} not in the language")
    aut, cls = _automaton_classes(g)
    ix = index(g)
    target = cls[ix.members(ix.image(ix.full, word))]
    for S in aut.states:
        img = ix.image(ix.mask(S), word)
        if img and cls[ix.members(img)] != target:
            return False
    return True


def synchronizing_path_to(g: LabeledGraph, v: str, depth: int | None = None) -> tuple[Edge, ...]:
    """Shortlex-least synchronizing word labeling a path into ``v``, as that path."""
    _require_rr(g)
    aut, cls = _automaton_classes(g)
    ix = index(g)
    target = g.vertices.index(v) if v in g.vertices else None
    if target is None:
        raise PreconditionError(f"vertex {v!r} not in graph")
    if depth is None:
        depth = 2 * len(aut.states)
    masks = [ix.mask(S) for S in aut.states]
    full_at = masks.index(ix.full)

    def synchronizing(images):
        ref = cls[ix.members(images[full_at])]
        return all(not m or cls[ix.members(m)] == ref for m in images)

    start = tuple(masks)
    seen = {start}
    frontier = [(start, ())]
    for _ in range(depth):
        nxt = []
        for images, word in frontier:
            for a in g.alphabet:
                new = tuple(ix.step(m, a) for m in images)
                if not new[full_at] or new in seen:
                    continue
                seen.add(new)
                w2 = word + (a,)
                if new[full_at] >> target & 1 and synchronizing(new):
                    src = min(ix.members(ix.preimage(1 << target, w2)))
                    return path_along(g, src, w2)
                nxt.append((new, w2))
        frontier = nxt
        if not frontier:
            break
    raise CapExceededError(f"no synchronizing path into {v} within depth {depth}")


def _joint_partition(g: LabeledGraph, h: LabeledGraph):
    # follower classes across the disjoint union of two right-resolving graphs
    union = LabeledGraph.from_edges(
        [("0:" + s, a, "0:" + d) for s, a, d in g.edges]
        + [("1:" + s, a, "1:" + d) for s, a, d in h.edges])
    return follower_partition(union)


def embed_theta(g: LabeledGraph, K: Cover | None = None) -> VertexMap:
    """Map each vertex of a regular presentation to the Krieger vertex with the same follower set."""
    _require_rr(g)
    _require_trim(g)
    if K is None:
        K = krieger_cover(g)
    irregular = set(g.vertices) - regular_vertices(g)
    if irregular:
        raise PreconditionError(f"vertices not regular: {sorted(irregular)}")
    part = _joint_partition(g, K.graph)
    by_class = {part.class_of["1:" + k]: k for k in K.graph.vertices}
    assign = {}
    for v in g.vertices:
        c = part.class_of["0:" + v]
        if c not in by_class:
            raise PreconditionError(f"vertex {v} has no Krieger counterpart")
        assign[v] = by_class[c]
    edge_map = {e: (assign[e[0]], e[1], assign[e[2]]) for e in g.edges}
    return VertexMap(g, K.graph, assign, edge_map)


def is_predecessor_separated(g: LabeledGraph) -> bool:
    """Whether distinct vertices have distinct sets of left-infinite label histories."""
    _require_trim(g)
    r = reverse(g)
    ix = index(r)
    seeds = [1 << i for i in range(ix.n)]
    masks, trans = _subset_closure(ix, seeds, r.alphabet, resolve_cap(MONOID_CAP))
    edges = [(str(s), a, str(t)) for (s, a), t in trans.items()]
    aut = LabeledGraph.from_edges(edges, vertices=(str(m) for m in masks))
    part = follower_partition(aut)
    classes = {part.class_of[str(m)] for m in seeds}
    return len(classes) == len(seeds)


def is_follower_separated(g: LabeledGraph) -> bool:
    return follower_partition(g).separated

