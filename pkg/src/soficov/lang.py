"""Word and language machinery over labeled graphs.

Vertex subsets travel through the public API as frozensets of vertex names;
internally they are bitmasks over the graph's sorted vertex list.  Words are
tuples of labels.  A plain ``str`` is accepted wherever a word is expected and
is read one character per letter, which suits single-character alphabets.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import CapExceededError, NotRightResolvingError, PreconditionError
from .graph import LabeledGraph, VertexMap, render_subset, subset_key

Word = tuple[str, ...]

MONOID_CAP = 10**6
WORDS_MAX_LENGTH = 16


def resolve_cap(default: int) -> int:
    """Cap value, overridden by the SOFICOV_CAP environment variable when set."""
    raw = os.environ.get("SOFICOV_CAP")
    if raw:
        try:
            return int(raw)
        except ValueError:
            raise PreconditionError(f"SOFICOV_CAP must be an integer, got {raw!r}") from None
    return default


def as_word(w: str | Sequence[str]) -> Word:
    if isinstance(w, str):
        return tuple(w)
    return tuple(str(a) for a in w)


def format_word(w: Sequence[str]) -> str:
    """Render a word compactly: juxtaposed for one-character labels, spaced otherwise."""
    if all(len(a) == 1 for a in w):
        return "".join(w)
    return " ".join(w)


def shortlex(w: Sequence[str]) -> tuple:
    return (len(w), tuple(w))


def bits(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


class _Index:
    """Bitmask view of a labeled graph."""

    def __init__(self, g: LabeledGraph):
        self.graph = g
        self.names = g.vertices
        self.pos = {v: i for i, v in enumerate(g.vertices)}
        self.n = len(g.vertices)
        self.full = (1 << self.n) - 1
        self.succ = {a: [0] * self.n for a in g.alphabet}
        self.pred = {a: [0] * self.n for a in g.alphabet}
        for s, a, d in g.edges:
            self.succ[a][self.pos[s]] |= 1 << self.pos[d]
            self.pred[a][self.pos[d]] |= 1 << self.pos[s]

    def mask(self, members: Iterable[str]) -> int:
        m = 0
        for v in members:
            try:
                m |= 1 << self.pos[v]
            except KeyError:
                raise PreconditionError(f"vertex {v!r} not in graph") from None
        return m

    def members(self, mask: int) -> frozenset[str]:
        return frozenset(self.names[i] for i in bits(mask))

    def step(self, mask: int, a: str) -> int:
        row = self.succ[a]
        out = 0
        for i in bits(mask):
            out |= row[i]
        return out

    def back(self, mask: int, a: str) -> int:
        row = self.pred[a]
        out = 0
        for i in bits(mask):
            out |= row[i]
        return out

    def image(self, mask: int, word: Iterable[str]) -> int:
        for a in word:
            if not mask:
                return 0
            mask = self.step(mask, a)
        return mask

    def preimage(self, mask: int, word: Sequence[str]) -> int:
        for a in reversed(word):
            if not mask:
                return 0
            mask = self.back(mask, a)
        return mask

    def stable_image(self, word: Sequence[str]) -> int:
        """Limit of the decreasing chain image(V, word^n)."""
        cur = self.full
        while True:
            nxt = self.image(cur, word)
            if nxt == cur:
                return cur
            cur = nxt

    def stable_preimage(self, word: Sequence[str]) -> int:
        """Limit of the decreasing chain pre(V, word^n)."""
        cur = self.full
        while True:
            nxt = self.preimage(cur, word)
            if nxt == cur:
                return cur
            cur = nxt


@lru_cache(maxsize=512)
def index(g: LabeledGraph) -> _Index:
    return _Index(g)


def _check_letters(g: LabeledGraph, word: Word):
    letters = set(g.alphabet)
    for a in word:
        if a not in letters:
            raise PreconditionError(f"letter {a!r} not in alphabet {list(g.alphabet)}")


def image_of(g: LabeledGraph, S: Iterable[str], w: str | Sequence[str]) -> frozenset[str]:
    """Forward image of the subset ``S`` along the word ``w``."""
    word = as_word(w)
    _check_letters(g, word)
    ix = index(g)
    return ix.members(ix.image(ix.mask(S), word))


def preimage_of(g: LabeledGraph, S: Iterable[str], w: str | Sequence[str]) -> frozenset[str]:
    """Vertices with a path labeled ``w`` ending in ``S``."""
    word = as_word(w)
    _check_letters(g, word)
    ix = index(g)
    return ix.members(ix.preimage(ix.mask(S), word))


def contains_word(g: LabeledGraph, w: str | Sequence[str]) -> bool:
    word = as_word(w)
    if any(a not in g.alphabet for a in word):
        return False
    ix = index(g)
    return ix.image(ix.full, word) != 0


def words_up_to(g: LabeledGraph, n: int) -> list[Word]:
    """All words of length at most ``n`` labeling paths of ``g``, in lexicographic order."""
    if n > WORDS_MAX_LENGTH:
        raise PreconditionError(f"word length {n} exceeds {WORDS_MAX_LENGTH}")
    ix = index(g)
    out: list[Word] = []
    stack: list[tuple[Word, int]] = [((), ix.full)]
    # depth-first with reversed pushes yields lexicographic order
    while stack:
        word, mask = stack.pop()
        out.append(word)
        if len(word) == n:
            continue
        for a in reversed(g.alphabet):
            nxt = ix.step(mask, a)
            if nxt:
                stack.append((word + (a,), nxt))
    return out


# -- subset automaton -----------------------------------------------------------------


@dataclass(frozen=True)
class SubsetAutomaton:
    graph: LabeledGraph = field(repr=False)
    states: tuple[frozenset[str], ...]
    transitions: dict[tuple[frozenset[str], str], frozenset[str]] = field(repr=False)
    initial: frozenset[str]

    def step(self, state: frozenset[str], a: str) -> frozenset[str] | None:
        return self.transitions.get((state, a))

    def to_graph(self, states: Iterable[frozenset[str]] | None = None) -> LabeledGraph:
        """The automaton as a labeled graph on rendered subset names."""
        keep = set(self.states if states is None else states)
        edges = [(render_subset(s), a, render_subset(t))
                 for (s, a), t in self.transitions.items() if s in keep and t in keep]
        return LabeledGraph.from_edges(edges, vertices=(render_subset(s) for s in keep),
                                       alphabet=self.graph.alphabet)


def _subset_closure(ix: _Index, seeds: Iterable[int], alphabet: Sequence[str],
                    cap: int) -> tuple[list[int], dict[tuple[int, str], int]]:
    seen: list[int] = []
    known = set()
    trans: dict[tuple[int, str], int] = {}
    queue = deque()
    for s in seeds:
        if s and s not in known:
            known.add(s)
            seen.append(s)
            queue.append(s)
    while queue:
        s = queue.popleft()
        for a in alphabet:
            t = ix.step(s, a)
            if not t:
                continue
            trans[(s, a)] = t
            if t not in known:
                if len(known) >= cap:
                    raise CapExceededError(f"subset construction exceeded {cap} states")
                known.add(t)
                seen.append(t)
                queue.append(t)
    return seen, trans


def subset_automaton(g: LabeledGraph) -> SubsetAutomaton:
    """Deterministic automaton of nonempty forward images, started at the full vertex set."""
    ix = index(g)
    masks, trans = _subset_closure(ix, [ix.full], g.alphabet, resolve_cap(MONOID_CAP))
    states = sorted((ix.members(m) for m in masks), key=subset_key)
    transitions = {(ix.members(s), a): ix.members(t) for (s, a), t in trans.items()}
    return SubsetAutomaton(g, tuple(states), transitions, ix.members(ix.full))


# -- relation monoid --------------------------------------------------------------


def compose_rows(r: tuple[int, ...], s: tuple[int, ...]) -> tuple[int, ...]:
    """Relation ``r`` followed by ``s`` (path order)."""
    out = []
    for row in r:
        acc = 0
        for j in bits(row):
            acc |= s[j]
        out.append(acc)
    return tuple(out)


@dataclass(frozen=True)
class Relation:
    """A transition relation of the graph together with a shortest word realizing it."""

    graph: LabeledGraph = field(repr=False, compare=False)
    rows: tuple[int, ...]
    witness: Word
    idempotent: bool

    @property
    def is_zero(self) -> bool:
        return not any(self.rows)

    @property
    def pairs(self) -> frozenset[tuple[str, str]]:
        names = self.graph.vertices
        return frozenset((names[i], names[j]) for i, row in enumerate(self.rows) for j in bits(row))

    @property
    def domain(self) -> frozenset[str]:
        return frozenset(self.graph.vertices[i] for i, row in enumerate(self.rows) if row)

    @property
    def range(self) -> frozenset[str]:
        acc = 0
        for row in self.rows:
            acc |= row
        return index(self.graph).members(acc)

    def then(self, other: "Relation") -> "Relation":
        rows = compose_rows(self.rows, other.rows)
        return Relation(self.graph, rows, self.witness + other.witness,
                        compose_rows(rows, rows) == rows)


@lru_cache(maxsize=256)
def _monoid(g: LabeledGraph) -> tuple[tuple[tuple[int, ...], Word], ...]:
    # breadth-first over right extensions; first discovery carries the shortlex-least witness
    ix = index(g)
    cap = resolve_cap(MONOID_CAP)
    letters = {a: tuple(ix.succ[a]) for a in g.alphabet}
    found: dict[tuple[int, ...], Word] = {}
    queue = deque()
    for a in g.alphabet:
        r = letters[a]
        if r not in found:
            found[r] = (a,)
            queue.append(r)
    while queue:
        r = queue.popleft()
        w = found[r]
        for a in g.alphabet:
            s = compose_rows(r, letters[a])
            if s not in found:
                if len(found) >= cap:
                    raise CapExceededError(f"relation monoid exceeded {cap} elements")
                found[s] = w + (a,)
                queue.append(s)
    return tuple(found.items())


def relation_monoid(g: LabeledGraph) -> tuple[Relation, ...]:
    """Semigroup generated by the letter relations, ordered by witness.

    Each relation carries its shortlex-least witness word.  The empty relation
    appears when some word is not realizable; check ``is_zero``.
    """
    out = [Relation(g, rows, w, compose_rows(rows, rows) == rows) for rows, w in _monoid(g)]
    out.sort(key=lambda r: shortlex(r.witness))
    return tuple(out)


def idempotents(g: LabeledGraph) -> list[Relation]:
    """Nonzero idempotent relations, ordered by witness."""
    return [r for r in relation_monoid(g) if r.idempotent and not r.is_zero]


@lru_cache(maxsize=256)
def _dee_family(g: LabeledGraph) -> tuple[tuple[int, Word, Word], ...]:
    # (mask, idempotent witness u, suffix w) with D = image(range(e_u), w)
    ix = index(g)
    found: dict[int, tuple[Word, Word]] = {}
    queue = deque()
    for r in idempotents(g):
        rng = 0
        for row in r.rows:
            rng |= row
        if rng not in found:
            found[rng] = (r.witness, ())
            queue.append(rng)
    while queue:
        m = queue.popleft()
        u, w = found[m]
        for a in g.alphabet:
            t = ix.step(m, a)
            if t and t not in found:
                found[t] = (u, w + (a,))
                queue.append(t)
    return tuple((m, u, w) for m, (u, w) in found.items())


def dee_family(g: LabeledGraph) -> tuple[frozenset[str], ...]:
    """The family of sets D^y: endpoints of left-infinite paths sharing a label history.

    Seeds are the ranges of nonzero idempotent relations; every left-infinite
    history factors through some idempotent infinitely often, so these seeds
    plus their forward images exhaust the family.
    """
    ix = index(g)
    return tuple(sorted((ix.members(m) for m, _, _ in _dee_family(g)), key=subset_key))


def dee_witnesses(g: LabeledGraph) -> dict[frozenset[str], tuple[Word, Word]]:
    """For each D in the family, a left tail ``(u, w)`` with D = D^{u^∞ w}."""
    ix = index(g)
    return {ix.members(m): (u, w) for m, u, w in _dee_family(g)}


# -- follower sets ----------------------------------------------------------------


def _require_rr(g: LabeledGraph):
    if not g.is_right_resolving:
        raise NotRightResolvingError("graph is not right-resolving")


def _require_no_sinks(g: LabeledGraph):
    sinks = [v for v in g.vertices if not g.out_edges[v]]
    if sinks:
        raise PreconditionError(f"graph has sinks: {sinks}")


@dataclass(frozen=True)
class FollowerPartition:
    graph: LabeledGraph = field(repr=False)
    class_of: dict[str, int]
    reps: tuple[str, ...]

    @property
    def classes(self) -> list[frozenset[str]]:
        groups: list[set[str]] = [set() for _ in self.reps]
        for v, c in self.class_of.items():
            groups[c].add(v)
        return [frozenset(s) for s in groups]

    @property
    def separated(self) -> bool:
        return len(self.reps) == len(self.class_of)

    def same(self, v: str, w: str) -> bool:
        return self.class_of[v] == self.class_of[w]


def follower_partition(g: LabeledGraph) -> FollowerPartition:
    """Vertices grouped by equal follower sets (Moore refinement)."""
    _require_rr(g)
    _require_no_sinks(g)
    block = {v: g.out_labels(v) for v in g.vertices}
    count = len(set(block.values()))
    while True:
        ids = {b: i for i, b in enumerate(sorted(set(block.values()), key=repr))}
        cur = {v: ids[block[v]] for v in g.vertices}
        block = {v: (cur[v], tuple(sorted((a, cur[d]) for _, a, d in g.out_edges[v])))
                 for v in g.vertices}
        new_count = len(set(block.values()))
        if new_count == count:
            break
        count = new_count
    # canonical class ids ordered by first member
    order: dict = {}
    reps = []
    class_of = {}
    for v in g.vertices:
        key = block[v]
        if key not in order:
            order[key] = len(reps)
            reps.append(v)
        class_of[v] = order[key]
    return FollowerPartition(g, class_of, tuple(reps))


def follower_includes(g1: LabeledGraph, v1: str, g2: LabeledGraph, v2: str) -> bool:
    """Whether f(v1) in ``g1`` is contained in f(v2) in ``g2``."""
    _require_rr(g1)
    _require_rr(g2)
    seen = {(v1, v2)}
    queue = deque(seen)
    while queue:
        x, y = queue.popleft()
        for _, a, x2 in g1.out_edges[x]:
            y2 = g2.successor(y, a)
            if y2 is None:
                return False
            if (x2, y2) not in seen:
                seen.add((x2, y2))
                queue.append((x2, y2))
    return True


@lru_cache(maxsize=256)
def inclusion_relation(g: LabeledGraph) -> frozenset[tuple[str, str]]:
    """All pairs (u, v) of ``g`` with f(u) contained in f(v), as a greatest simulation."""
    _require_rr(g)
    succ = {v: {a: d for _, a, d in g.out_edges[v]} for v in g.vertices}
    rel = {(u, v) for u in g.vertices for v in g.vertices if succ[u].keys() <= succ[v].keys()}
    changed = True
    while changed:
        changed = False
        for u, v in list(rel):
            if any((d, succ[v][a]) not in rel for a, d in succ[u].items()):
                rel.discard((u, v))
                changed = True
    return frozenset(rel)


def class_name(members: Iterable[str]) -> str:
    """Name of a merged class: its shortest member name, ties broken lexicographically."""
    return min(members, key=lambda s: (len(s), s))


def merged_graph(g: LabeledGraph) -> tuple[LabeledGraph, VertexMap]:
    """Quotient of ``g`` by follower-set equality and the quotient map."""
    part = follower_partition(g)
    names = {i: class_name(c) for i, c in enumerate(part.classes)}
    assign = {v: names[part.class_of[v]] for v in g.vertices}
    merged = LabeledGraph.from_edges(((assign[s], a, assign[d]) for s, a, d in g.edges),
                                     vertices=names.values(), alphabet=g.alphabet)
    edge_map = {e: (assign[e[0]], e[1], assign[e[2]]) for e in g.edges}
    return merged, VertexMap(g, merged, assign, edge_map)


# -- language comparison ------------------------------------------------------------


def separating_word(g1: LabeledGraph, g2: LabeledGraph) -> Word | None:
    """Shortlex-least word realizable in exactly one of the two graphs, or None."""
    i1, i2 = index(g1), index(g2)
    letters = sorted(set(g1.alphabet) | set(g2.alphabet))
    start = (i1.full, i2.full)
    seen = {start: ()}
    queue = deque([start])
    while queue:
        s1, s2 = queue.popleft()
        w = seen[(s1, s2)]
        for a in letters:
            t1 = i1.step(s1, a) if a in i1.succ else 0
            t2 = i2.step(s2, a) if a in i2.succ else 0
            if bool(t1) != bool(t2):
                return w + (a,)
            if t1 and (t1, t2) not in seen:
                seen[(t1, t2)] = w + (a,)
                queue.append((t1, t2))
    return None


def language_equal(g1: LabeledGraph, g2: LabeledGraph) -> bool:
    return separating_word(g1, g2) is None
