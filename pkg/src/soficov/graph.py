"""Labeled directed multigraphs: data model, .lg I/O, structural analyses and recodings.

A labeled graph is a finite set of edges ``(src, label, dst)``.  Two edges with
the same source and target but different labels are distinct; identical
triples collapse.  Vertex names and labels are free-form tokens without
whitespace.
"""

from __future__ import annotations

import json
import re
import warnings
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

from .errors import LgSyntaxError, NotHereditaryError, PreconditionError

Edge = tuple[str, str, str]

TOKEN_RE = re.compile(r"^[A-Za-z0-9_{},.+\-]+$")


class DuplicateEdgeWarning(UserWarning):
    pass


def render_subset(members: Iterable[str]) -> str:
    """Canonical name of a vertex subset, e.g. ``{a,b}``."""
    return "{" + ",".join(sorted(members)) + "}"


def subset_key(members: Iterable[str]) -> tuple:
    """Sort key for subsets: smaller first, then lexicographic members."""
    ms = sorted(members)
    return (len(ms), ms)


@dataclass(frozen=True)
class LabeledGraph:
    vertices: tuple[str, ...]
    alphabet: tuple[str, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        vs = set(self.vertices)
        letters = set(self.alphabet)
        if len(vs) != len(self.vertices):
            raise PreconditionError("duplicate vertex names")
        if len(set(self.edges)) != len(self.edges):
            raise PreconditionError("duplicate edges")
        for s, a, d in self.edges:
            if s not in vs or d not in vs:
                raise PreconditionError(f"edge {s} -{a}-> {d} references an unknown vertex")
            if a not in letters:
                raise PreconditionError(f"edge {s} -{a}-> {d} uses a label outside the alphabet")

    @classmethod
    def from_edges(cls, edges: Iterable[Edge], vertices: Iterable[str] = (),
                   alphabet: Iterable[str] = ()) -> "LabeledGraph":
        """Build a normalized graph: sorted vertices, labels and edges, duplicates dropped."""
        es = sorted({(str(s), str(a), str(d)) for s, a, d in edges})
        vs = set(vertices)
        letters = set(alphabet)
        for s, a, d in es:
            vs.update((s, d))
            letters.add(a)
        return cls(tuple(sorted(vs)), tuple(sorted(letters)), tuple(es))

    def __len__(self):
        return len(self.vertices)

    @cached_property
    def out_edges(self) -> dict[str, tuple[Edge, ...]]:
        out: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            out[e[0]].append(e)
        return {v: tuple(es) for v, es in out.items()}

    @cached_property
    def in_edges(self) -> dict[str, tuple[Edge, ...]]:
        inc: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            inc[e[2]].append(e)
        return {v: tuple(es) for v, es in inc.items()}

    @cached_property
    def is_right_resolving(self) -> bool:
        seen = set()
        for s, a, _ in self.edges:
            if (s, a) in seen:
                return False
            seen.add((s, a))
        return True

    @cached_property
    def is_trim(self) -> bool:
        return all(self.out_edges[v] and self.in_edges[v] for v in self.vertices)

    def successor(self, v: str, a: str) -> str | None:
        """The unique ``a``-successor of ``v`` in a right-resolving graph, or None."""
        for _, b, d in self.out_edges[v]:
            if b == a:
                return d
        return None

    def out_labels(self, v: str) -> frozenset[str]:
        return frozenset(a for _, a, _ in self.out_edges[v])


# -- .lg / dot / json -----------------------------------------------------------------


def parse_lg(text: str) -> LabeledGraph:
    edges: list[Edge] = []
    seen: set[Edge] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise LgSyntaxError(f"expected 'SRC LABEL DST', got {raw!r}", lineno)
        for tok in parts:
            if not TOKEN_RE.match(tok):
                raise LgSyntaxError(f"invalid token {tok!r}", lineno)
        e = (parts[0], parts[1], parts[2])
        if e in seen:
            warnings.warn(f"line {lineno}: duplicate edge {' '.join(e)} ignored",
                          DuplicateEdgeWarning, stacklevel=2)
            continue
        seen.add(e)
        edges.append(e)
    if not edges:
        raise LgSyntaxError("no edges")
    return LabeledGraph.from_edges(edges)


def parse_json(text: str) -> LabeledGraph:
    data = json.loads(text)
    return LabeledGraph.from_edges((tuple(e) for e in data["edges"]),
                                   data.get("vertices", ()), data.get("alphabet", ()))


def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def serialize(g: LabeledGraph, fmt: str = "lg") -> str:
    if fmt == "lg":
        return "".join(f"{s} {a} {d}\n" for s, a, d in g.edges)
    if fmt == "dot":
        lines = ["digraph G {"]
        lines += [f"  {_dot_quote(v)};" for v in g.vertices]
        lines += [f"  {_dot_quote(s)} -> {_dot_quote(d)} [label={_dot_quote(a)}];"
                  for s, a, d in g.edges]
        lines.append("}")
        return "\n".join(lines) + "\n"
    if fmt == "json":
        data = {"vertices": list(g.vertices), "alphabet": list(g.alphabet),
                "edges": [list(e) for e in g.edges]}
        return json.dumps(data, indent=2) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


# -- structure --------------------------------------------------------------------


def induced_subgraph(g: LabeledGraph, keep: Iterable[str]) -> LabeledGraph:
    """Subgraph on ``keep`` with the edges whose both ends lie in ``keep``."""
    ks = set(keep)
    return LabeledGraph.from_edges((e for e in g.edges if e[0] in ks and e[2] in ks),
                                   vertices=ks, alphabet=g.alphabet)


def trim(g: LabeledGraph) -> LabeledGraph:
    """Largest subgraph without sources or sinks (possibly empty)."""
    alive = set(g.vertices)
    outdeg = {v: 0 for v in alive}
    indeg = {v: 0 for v in alive}
    for s, _, d in g.edges:
        outdeg[s] += 1
        indeg[d] += 1
    queue = deque(v for v in g.vertices if not outdeg[v] or not indeg[v])
    while queue:
        v = queue.popleft()
        if v not in alive:
            continue
        alive.discard(v)
        for s, _, d in g.out_edges[v]:
            if d in alive:
                indeg[d] -= 1
                if not indeg[d]:
                    queue.append(d)
        for s, _, d in g.in_edges[v]:
            if s in alive:
                outdeg[s] -= 1
                if not outdeg[s]:
                    queue.append(s)
    return induced_subgraph(g, alive)


def _tarjan(vertices: Iterable[str], succ: Mapping[str, Iterable[str]]) -> list[list[str]]:
    # iterative Tarjan; returns SCCs in reverse topological order
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    sccs: list[list[str]] = []
    counter = 0
    for root in vertices:
        if root in index:
            continue
        work = [(root, iter(succ[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ[w])))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(comp)
    return sccs


@dataclass(frozen=True)
class ComponentDAG:
    """Communicating classes of recurrent vertices and their reachability order.

    ``dag_edges`` holds a pair ``(i, j)`` whenever some vertex of component
    ``i`` reaches some vertex of component ``j != i``; the relation is
    therefore transitively closed.
    """

    components: tuple[frozenset[str], ...]
    dag_edges: frozenset[tuple[int, int]]
    terminal: tuple[bool, ...]
    source: tuple[bool, ...]
    transient: frozenset[str]
    multiplicity: tuple[int | None, ...] = field(default=())

    def component_of(self, v: str) -> int | None:
        for i, c in enumerate(self.components):
            if v in c:
                return i
        return None

    @property
    def terminal_components(self) -> list[frozenset[str]]:
        return [c for c, t in zip(self.components, self.terminal) if t]

    @property
    def source_components(self) -> list[frozenset[str]]:
        return [c for c, s in zip(self.components, self.source) if s]


def components(g: LabeledGraph, subsets: Mapping[str, frozenset] | None = None) -> ComponentDAG:
    """Component DAG of ``g``.

    When ``subsets`` maps each vertex to the vertex subset it stands for, the
    per-component multiplicity (common cardinality of the members) is filled
    in; it stays None for components mixing cardinalities.
    """
    succ = {v: [d for _, _, d in g.out_edges[v]] for v in g.vertices}
    order = {v: i for i, v in enumerate(g.vertices)}
    comps = []
    transient = set()
    for scc in _tarjan(g.vertices, succ):
        if len(scc) > 1 or scc[0] in succ[scc[0]]:
            comps.append(frozenset(scc))
        else:
            transient.update(scc)
    comps.sort(key=lambda c: sorted(order[v] for v in c))
    comp_of = {v: i for i, c in enumerate(comps) for v in c}

    dag = set()
    for i, c in enumerate(comps):
        seen = set(c)
        queue = deque(c)
        while queue:
            v = queue.popleft()
            for w in succ[v]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        for w in seen:
            j = comp_of.get(w)
            if j is not None and j != i:
                dag.add((i, j))
    terminal = tuple(not any(i == a for a, _ in dag) for i in range(len(comps)))
    source = tuple(not any(i == b for _, b in dag) for i in range(len(comps)))
    mult: tuple[int | None, ...] = ()
    if subsets is not None:
        ms = []
        for c in comps:
            sizes = {len(subsets[v]) for v in c}
            ms.append(sizes.pop() if len(sizes) == 1 else None)
        mult = tuple(ms)
    return ComponentDAG(tuple(comps), frozenset(dag), terminal, source, frozenset(transient), mult)


def hereditary_closure(g: LabeledGraph, seed: Iterable[str]) -> frozenset[str]:
    """Smallest superset of ``seed`` closed under out-edges."""
    closed = set(seed)
    unknown = closed - set(g.vertices)
    if unknown:
        raise PreconditionError(f"vertices not in graph: {sorted(unknown)}")
    queue = deque(closed)
    while queue:
        v = queue.popleft()
        for _, _, d in g.out_edges[v]:
            if d not in closed:
                closed.add(d)
                queue.append(d)
    return frozenset(closed)


def restrict_hereditary(g: LabeledGraph, keep: Iterable[str]) -> LabeledGraph:
    """Hereditary labeled subgraph: vertices ``keep`` and every edge leaving them."""
    ks = frozenset(keep)
    for v in ks:
        if v not in g.out_edges:
            raise PreconditionError(f"vertex {v!r} not in graph")
        for s, a, d in g.out_edges[v]:
            if d not in ks:
                raise NotHereditaryError(f"{s} emits {a} to {d}, outside the subset")
    return LabeledGraph.from_edges((e for e in g.edges if e[0] in ks),
                                   vertices=ks, alphabet=g.alphabet)


# -- recodings --------------------------------------------------------------------


def _edge_token(e: Edge) -> str:
    return ".".join(e)


def higher_block(g: LabeledGraph, n: int, label: str = "first") -> LabeledGraph:
    """n-th higher block presentation.

    Vertices are paths of length n-1, edges paths of length n.  ``label``
    selects the edge label: ``first`` or ``last`` edge label of the path (same
    shift; ``last`` keeps right-resolving graphs right-resolving), or
    ``block`` for the dot-joined label n-block, which presents the n-block
    recoding of the shift (a conjugate shift).
    """
    if n < 1:
        raise PreconditionError("block length must be positive")
    if label not in ("first", "last", "block"):
        raise ValueError(f"unknown label mode {label!r}")
    if n == 1:
        if label in ("first", "last"):
            return g
        return g
    paths: list[tuple[Edge, ...]] = [(e,) for e in g.edges]
    for _ in range(n - 2):
        paths = [p + (e,) for p in paths for e in g.out_edges[p[-1][2]]]
    names = {p: "_".join(_edge_token(e) for e in p) for p in paths}
    if len(set(names.values())) != len(names):
        names = {p: f"p{i}" for i, p in enumerate(sorted(paths))}
    edges = []
    for p in paths:
        for e in g.out_edges[p[-1][2]]:
            q = p[1:] + (e,)
            full = p + (e,)
            if label == "first":
                lab = full[0][1]
            elif label == "last":
                lab = full[-1][1]
            else:
                lab = ".".join(x[1] for x in full)
            edges.append((names[p], lab, names[q]))
    return LabeledGraph.from_edges(edges, vertices=names.values())


def relabel(g: LabeledGraph, mapping: Mapping[str, str]) -> LabeledGraph:
    missing = [a for a in g.alphabet if a not in mapping]
    if missing:
        raise PreconditionError(f"relabeling undefined on {missing}")
    image = [mapping[a] for a in g.alphabet]
    if len(set(image)) != len(image):
        raise PreconditionError("relabeling is not injective on the alphabet")
    return LabeledGraph.from_edges(((s, mapping[a], d) for s, a, d in g.edges),
                                   vertices=g.vertices, alphabet=image)


def reverse(g: LabeledGraph) -> LabeledGraph:
    return LabeledGraph.from_edges(((d, a, s) for s, a, d in g.edges),
                                   vertices=g.vertices, alphabet=g.alphabet)


def rename_vertices(g: LabeledGraph, mapping: Mapping[str, str]) -> LabeledGraph:
    return LabeledGraph.from_edges(((mapping[s], a, mapping[d]) for s, a, d in g.edges),
                                   vertices=(mapping[v] for v in g.vertices),
                                   alphabet=g.alphabet)


@dataclass(frozen=True)
class GraphReport:
    trim: bool
    right_resolving: bool
    vertices: int
    edges: int
    alphabet: int


def validate(g: LabeledGraph) -> GraphReport:
    return GraphReport(g.is_trim, g.is_right_resolving, len(g.vertices), len(g.edges),
                       len(g.alphabet))


@dataclass(frozen=True)
class VertexMap:
    domain: LabeledGraph
    codomain: LabeledGraph
    assignment: Mapping[str, str]
    edge_assignment: Mapping[Edge, Edge] | None = None

    def __getitem__(self, v: str) -> str:
        return self.assignment[v]

    @property
    def image(self) -> frozenset[str]:
        return frozenset(self.assignment.values())

    @property
    def is_injective(self) -> bool:
        return len(set(self.assignment.values())) == len(self.assignment)

    def is_homomorphism(self) -> bool:
        """Every edge maps to an edge of the codomain with the same label."""
        target = set(self.codomain.edges)
        for s, a, d in self.domain.edges:
            img = (self.assignment[s], a, self.assignment[d])
            if img not in target:
                return False
            if self.edge_assignment is not None and self.edge_assignment[(s, a, d)] != img:
                return False
        return True
