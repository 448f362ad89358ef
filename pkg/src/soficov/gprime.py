"""The double subset graph G″, fiber paths β(y), and the G′ cover they generate."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any

from .covers import Cover, EPPath, EventuallyPeriodicPoint, _require_trim
from .errors import CapExceededError, ConsistencyError, NotInShiftError, PreconditionError
from .graph import (ComponentDAG, LabeledGraph, components, hereditary_closure, render_subset,
                    restrict_hereditary, reverse, trim)
from .lang import (dee_witnesses, format_word, idempotents, index, resolve_cap, words_up_to,
                   _require_rr)

SUBSET_CAP = 2**16


@lru_cache(maxsize=128)
def double_subset_graph(g: LabeledGraph) -> Cover:
    """Trimmed graph on nonempty subsets: F -a-> [F,a] when every member of F emits a."""
    _require_rr(g)
    _require_trim(g)
    ix = index(g)
    cap = resolve_cap(SUBSET_CAP)
    if ix.full > cap:
        raise CapExceededError(f"{ix.full} subsets exceed the cap of {cap}")
    emits = {a: sum(1 << i for i, row in enumerate(ix.succ[a]) if row) for a in g.alphabet}
    edges = []
    for m in range(1, ix.full + 1):
        src = render_subset(ix.members(m))
        for a in g.alphabet:
            if m & ~emits[a]:
                continue
            edges.append((src, a, render_subset(ix.members(ix.step(m, a)))))
    full = LabeledGraph.from_edges(edges, alphabet=g.alphabet)
    graph = trim(full)
    prov = {render_subset(ix.members(m)): ix.members(m) for m in range(1, ix.full + 1)}
    return Cover(graph, "double-subset", {v: prov[v] for v in graph.vertices}, g)


# -- fibers --------------------------------------------------------------------------


def _first_repeat(seq_next, first):
    """Iterate until a value repeats; return (values, preperiod, period)."""
    values = [first]
    where = {first: 0}
    while True:
        nxt = seq_next(values[-1], len(values))
        if nxt in where:
            start = where[nxt]
            return values, start, len(values) - start
        where[nxt] = len(values)
        values.append(nxt)


@dataclass(frozen=True)
class FiberPath:
    """β(y): the subsets F_i = D_i ∩ W_i of vertices that bi-infinite paths labeled y visit.

    Fibers are listed as one left period, the transient starting at position
    ``origin``, and one right period.
    """

    point: EventuallyPeriodicPoint
    left_cycle: tuple[frozenset[str], ...]
    transient: tuple[frozenset[str], ...]
    right_cycle: tuple[frozenset[str], ...]
    origin: int
    host: LabeledGraph = field(repr=False, compare=False)

    def fiber(self, i: int) -> frozenset[str]:
        j = i - self.origin
        if j < 0:
            return self.left_cycle[j % len(self.left_cycle)]
        if j < len(self.transient):
            return self.transient[j]
        return self.right_cycle[(j - len(self.transient)) % len(self.right_cycle)]

    @property
    def span(self) -> tuple[int, int]:
        return (self.origin - len(self.left_cycle),
                self.origin + len(self.transient) + len(self.right_cycle))

    def edge(self, i: int):
        return (render_subset(self.fiber(i)), self.point.letter(i),
                render_subset(self.fiber(i + 1)))

    @property
    def path(self) -> EPPath:
        """The fiber sequence as an eventually periodic path in G″."""
        lo, hi = self.span
        mid_lo = self.origin
        mid_hi = self.origin + len(self.transient)
        return EPPath(self.host,
                      tuple(self.edge(i) for i in range(lo, mid_lo)),
                      tuple(self.edge(i) for i in range(mid_lo, mid_hi)),
                      tuple(self.edge(i) for i in range(mid_hi, hi)),
                      self.origin)

    @property
    def backward_vertices(self) -> frozenset[str]:
        return frozenset(render_subset(F) for F in self.left_cycle)


def beta(g: LabeledGraph, y: EventuallyPeriodicPoint) -> FiberPath:
    """Fiber path of ``y`` through the double subset graph."""
    _require_rr(g)
    ix = index(g)
    u, w, v = y.u, y.w, y.v
    Ds = ix.stable_image(u)
    Wv = ix.stable_preimage(v)
    if not Ds or not Wv:
        raise NotInShiftError(f"{y} is not in the shift")
    W0 = ix.preimage(Wv, w)
    # W at left block boundaries -m|u| and D at right block boundaries |w| + k|v|
    Wl, m0, p = _first_repeat(lambda W, _: ix.preimage(W, u), W0)
    Dr, k0, q = _first_repeat(lambda D, _: ix.image(D, v), ix.image(Ds, w))

    def D_at(i: int) -> int:
        if i <= 0:
            return ix.image(Ds, u[: i % len(u)])
        if i <= len(w):
            return ix.image(Ds, w[:i])
        k, r = divmod(i - len(w), len(v))
        if k >= len(Dr):
            k = k0 + (k - k0) % q
        return ix.image(Dr[k], v[:r])

    def W_at(i: int) -> int:
        if i >= len(w):
            return ix.preimage(Wv, v[(i - len(w)) % len(v):])
        if i >= 0:
            return ix.preimage(Wv, w[i:])
        m, r = divmod(i, len(u))
        m = -m
        if m - 1 >= len(Wl):
            m = m0 + 1 + (m - 1 - m0) % p
        return ix.preimage(Wl[m - 1], u[r:])

    def F(i: int) -> frozenset[str]:
        f = D_at(i) & W_at(i)
        if not f:
            raise NotInShiftError(f"{y} is not in the shift (empty fiber at {i})")
        return ix.members(f)

    origin = -m0 * len(u)
    left_lo = origin - p * len(u)
    right_lo = len(w) + k0 * len(v)
    right_hi = right_lo + q * len(v)
    host = double_subset_graph(g).graph
    return FiberPath(y,
                     tuple(F(i) for i in range(left_lo, origin)),
                     tuple(F(i) for i in range(origin, right_lo)),
                     tuple(F(i) for i in range(right_lo, right_hi)),
                     origin, host)


# -- selection of backward asymptotic components ------------------------------------------


@dataclass(frozen=True)
class SelectionReport:
    """Components of G″ reached backward asymptotically by some β(y), with witnesses."""

    dag: ComponentDAG
    selected: tuple[int, ...]
    witnesses: dict[int, EventuallyPeriodicPoint]
    method: str
    bounds: dict[str, Any]

    @property
    def selected_components(self) -> list[frozenset[str]]:
        return [self.dag.components[i] for i in self.selected]

    def to_json(self) -> dict:
        comps = []
        for i, c in enumerate(self.dag.components):
            entry = {"vertices": sorted(c), "multiplicity": self.dag.multiplicity[i],
                     "selected": i in self.witnesses}
            if i in self.witnesses:
                y = self.witnesses[i]
                entry["witness"] = [format_word(y.u), format_word(y.w), format_word(y.v)]
            comps.append(entry)
        return {"method": self.method, "bounds": self.bounds, "components": comps}


def _component_map(dag: ComponentDAG) -> dict[str, int]:
    return {v: i for i, c in enumerate(dag.components) for v in c}


def _backward_component(fp: FiberPath, comp_of: dict[str, int]) -> int:
    found = {comp_of.get(v) for v in fp.backward_vertices}
    if len(found) != 1 or None in found:
        raise ConsistencyError(f"backward tail of beta({fp.point}) is not inside one component")
    return found.pop()


def right_family(g: LabeledGraph) -> dict[frozenset[str], tuple[tuple, tuple]]:
    """Viability sets of right-infinite sequences, each with a witness ``(w, v)`` for w v^∞."""
    out = {}
    for W, (u_r, w_r) in dee_witnesses(reverse(g)).items():
        out[W] = (tuple(reversed(w_r)), tuple(reversed(u_r)))
    return out


def _exact_selection(g: LabeledGraph, comp_of: dict[str, int]):
    # far to the left every history factors through some idempotent e, so the
    # backward fibers are range(e) ∩ pre(W, e) with W a right viability set
    ix = index(g)
    family = sorted(right_family(g).items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))
    witnesses: dict[int, EventuallyPeriodicPoint] = {}
    idem = idempotents(g)
    for e in idem:
        rng = 0
        for row in e.rows:
            rng |= row
        for W, (w, v) in family:
            Fm = rng & ix.preimage(ix.mask(W), e.witness)
            if not Fm:
                continue
            c = comp_of.get(render_subset(ix.members(Fm)))
            if c is None:
                raise ConsistencyError(f"fiber {render_subset(ix.members(Fm))} missing from G''")
            if c in witnesses:
                continue
            y = EventuallyPeriodicPoint(e.witness, w, v)
            if _backward_component(beta(g, y), comp_of) != c:
                raise ConsistencyError(f"witness {y} does not reach component {c}")
            witnesses[c] = y
    bounds = {"idempotents": len(idem), "right_family": len(family)}
    return witnesses, bounds


def _bounded_selection(g: LabeledGraph, comp_of: dict[str, int], left: int, mid: int,
                       right: int):
    ix = index(g)
    # the backward component depends on u only through its relation, so keep the
    # shortlex-first word per relation
    lefts = {}
    for u in words_up_to(g, left):
        if u and ix.stable_image(u):
            lefts.setdefault(tuple(ix.image(1 << i, u) for i in range(ix.n)), u)
    rights: dict[int, tuple] = {}
    for v in words_up_to(g, right):
        if v:
            Wv = ix.stable_preimage(v)
            if Wv:
                rights.setdefault(Wv, v)
    tails: dict[int, tuple] = {}
    for w in words_up_to(g, mid):
        for Wv, v in rights.items():
            W0 = ix.preimage(Wv, w)
            if W0 and W0 not in tails:
                tails[W0] = (w, v)
    witnesses: dict[int, EventuallyPeriodicPoint] = {}
    for u in lefts.values():
        for w, v in tails.values():
            y = EventuallyPeriodicPoint(u, w, v)
            try:
                fp = beta(g, y)
            except NotInShiftError:
                continue
            c = _backward_component(fp, comp_of)
            witnesses.setdefault(c, y)
    return witnesses, {"left": left, "mid": mid, "right": right}


def asymptotic_components(g: LabeledGraph, method: str = "exact",
                          left_bound: int | None = None, mid_bound: int | None = None,
                          right_bound: int | None = None) -> SelectionReport:
    """Components of G″ that some β(y) approaches backward.

    ``exact`` enumerates idempotents against right viability sets and is
    complete.  ``bounded`` tries every y = u^∞ w v^∞ with words up to the
    given lengths; it is a cross-check, complete only when the bounds are
    large enough.
    """
    G2 = double_subset_graph(g)
    dag = components(G2.graph, subsets=G2.provenance)
    comp_of = _component_map(dag)
    if method == "exact":
        witnesses, bounds = _exact_selection(g, comp_of)
    elif method == "bounded":
        default = min(len(G2.graph.vertices), 6)
        witnesses, bounds = _bounded_selection(
            g, comp_of,
            left_bound if left_bound is not None else default,
            mid_bound if mid_bound is not None else default,
            right_bound if right_bound is not None else default)
    else:
        raise ValueError(f"unknown selection method {method!r}")
    selected = tuple(sorted(witnesses))
    return SelectionReport(dag, selected, {c: witnesses[c] for c in selected}, method, bounds)


def gprime_cover(g: LabeledGraph, selection: SelectionReport | None = None) -> Cover:
    """Hereditary subgraph of G″ generated by the selected components."""
    G2 = double_subset_graph(g)
    if selection is None:
        selection = asymptotic_components(g)
    seed = set().union(*selection.selected_components) if selection.selected else set()
    keep = hereditary_closure(G2.graph, seed)
    graph = restrict_hereditary(G2.graph, keep)
    return Cover(graph, "gprime", {v: G2.provenance[v] for v in graph.vertices}, g)


def multiplicity_check(cover: Cover) -> tuple[int, ...]:
    """Common subset size per component of a subset-valued cover."""
    if cover.kind not in ("double-subset", "gprime", "underline"):
        raise PreconditionError(f"cover of kind {cover.kind} is not subset-valued")
    dag = components(cover.graph, subsets=cover.provenance)
    if any(m is None for m in dag.multiplicity):
        bad = [sorted(c) for c, m in zip(dag.components, dag.multiplicity) if m is None]
        raise ConsistencyError(f"components mix subset sizes: {bad}")
    return tuple(dag.multiplicity)

