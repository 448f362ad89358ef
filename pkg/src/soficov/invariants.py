"""Conjugacy invariants of covers and labeled-graph isomorphism."""

from __future__ import annotations

import hashlib
import json
from collections import Counter
from dataclasses import dataclass, field

from .covers import Cover, krieger_cover
from .errors import CapExceededError, PreconditionError
from .graph import LabeledGraph, VertexMap, components, higher_block, induced_subgraph, relabel
from .gprime import gprime_cover

MAX_PERIOD = 12
ISO_CAP = 64


def _matmul(A, B):
    n = len(A)
    cols = list(zip(*B))
    return [[sum(a * b for a, b in zip(A[i], cols[j])) for j in range(n)] for i in range(n)]


def adjacency(g: LabeledGraph) -> list[list[int]]:
    pos = {v: i for i, v in enumerate(g.vertices)}
    A = [[0] * len(g.vertices) for _ in g.vertices]
    for s, _, d in g.edges:
        A[pos[s]][pos[d]] += 1
    return A


def periodic_counts(g: LabeledGraph, K: int = 8) -> list[int]:
    """Number of points of period n in the edge shift, n = 1..K (trace of A^n)."""
    if K > MAX_PERIOD:
        raise PreconditionError(f"max period {K} exceeds {MAX_PERIOD}")
    A = adjacency(g)
    out = []
    P = A
    for n in range(1, K + 1):
        if n > 1:
            P = _matmul(P, A)
        out.append(sum(P[i][i] for i in range(len(A))))
    return out


# -- isomorphism ------------------------------------------------------------------------


def _labels_between(g: LabeledGraph) -> dict[tuple[str, str], tuple[str, ...]]:
    out: dict[tuple[str, str], list[str]] = {}
    for s, a, d in g.edges:
        out.setdefault((s, d), []).append(a)
    return {k: tuple(sorted(v)) for k, v in out.items()}


def _refine(g1: LabeledGraph, g2: LabeledGraph):
    # colour refinement on the disjoint union so colours are comparable across graphs
    graphs = (g1, g2)
    color = {}
    for k, g in enumerate(graphs):
        for v in g.vertices:
            color[(k, v)] = (tuple(sorted(a for _, a, _ in g.out_edges[v])),
                             tuple(sorted(a for _, a, _ in g.in_edges[v])),
                             tuple(sorted(a for _, a, d in g.out_edges[v] if d == v)))
    count = len(set(color.values()))
    while True:
        new = {}
        for k, g in enumerate(graphs):
            for v in g.vertices:
                new[(k, v)] = (color[(k, v)],
                               tuple(sorted((a, color[(k, d)]) for _, a, d in g.out_edges[v])),
                               tuple(sorted((a, color[(k, s)]) for s, a, _ in g.in_edges[v])))
        ids = {c: i for i, c in enumerate(sorted(set(new.values()), key=repr))}
        color = {key: ids[c] for key, c in new.items()}
        if len(ids) == count:
            return color
        count = len(ids)


def graphs_isomorphic(g1: LabeledGraph, g2: LabeledGraph) -> VertexMap | None:
    """A label-preserving isomorphism from ``g1`` onto ``g2``, or None."""
    if (len(g1.vertices), len(g1.edges)) != (len(g2.vertices), len(g2.edges)):
        return None
    if Counter(a for _, a, _ in g1.edges) != Counter(a for _, a, _ in g2.edges):
        return None
    if len(g1.vertices) > ISO_CAP:
        raise CapExceededError(f"isomorphism search limited to {ISO_CAP} vertices")
    color = _refine(g1, g2)
    c1 = Counter(color[(0, v)] for v in g1.vertices)
    c2 = Counter(color[(1, v)] for v in g2.vertices)
    if c1 != c2:
        return None
    lab1, lab2 = _labels_between(g1), _labels_between(g2)
    order = sorted(g1.vertices, key=lambda v: (c1[color[(0, v)]], v))
    cands = {v: [w for w in g2.vertices if color[(1, w)] == color[(0, v)]] for v in g1.vertices}
    assign: dict[str, str] = {}
    used: set[str] = set()

    def consistent(v: str, w: str) -> bool:
        if lab1.get((v, v), ()) != lab2.get((w, w), ()):
            return False
        for x, y in assign.items():
            if lab1.get((v, x), ()) != lab2.get((w, y), ()):
                return False
            if lab1.get((x, v), ()) != lab2.get((y, w), ()):
                return False
        return True

    def search(i: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        for w in cands[v]:
            if w in used or not consistent(v, w):
                continue
            assign[v] = w
            used.add(w)
            if search(i + 1):
                return True
            del assign[v]
            used.discard(w)
        return False

    if not search(0):
        return None
    edge_map = {e: (assign[e[0]], e[1], assign[e[2]]) for e in g1.edges}
    vm = VertexMap(g1, g2, dict(assign), edge_map)
    if not vm.is_homomorphism():
        raise AssertionError("isomorphism certificate failed verification")
    return vm


# -- reports ------------------------------------------------------------------------


@dataclass(frozen=True)
class InvariantReport:
    kind: str
    vertices: int
    edges: int
    periodic: tuple[int, ...]
    components: tuple[dict, ...] = field(hash=False)
    dag: str

    def to_json(self) -> dict:
        return {"cover": self.kind, "vertices": self.vertices, "edges": self.edges,
                "periodic": list(self.periodic), "components": [dict(c) for c in self.components],
                "dag": self.dag}

    @property
    def signature(self) -> tuple:
        """Component multiset and DAG hash, the part compared across recodings."""
        return (tuple(json.dumps(c, sort_keys=True) for c in self.components), self.dag)


def _component_entries(g: LabeledGraph, subsets) -> tuple[list[dict], list[tuple[int, int]]]:
    dag = components(g, subsets=subsets)
    entries = []
    for i, c in enumerate(dag.components):
        sub = induced_subgraph(g, c)
        entries.append({"size": len(c), "edges": len(sub.edges),
                        "multiplicity": dag.multiplicity[i] if dag.multiplicity else None,
                        "terminal": dag.terminal[i], "source": dag.source[i]})
    return entries, sorted(dag.dag_edges)


def _dag_hash(entries: list[dict], dag_edges) -> str:
    keys = [json.dumps(e, sort_keys=True) for e in entries]
    shape = {"components": sorted(keys), "edges": sorted([keys[i], keys[j]] for i, j in dag_edges)}
    return hashlib.sha256(json.dumps(shape, sort_keys=True).encode()).hexdigest()[:16]


def invariant_report(c: Cover | LabeledGraph, K: int = 8) -> InvariantReport:
    if isinstance(c, Cover):
        g, kind = c.graph, c.kind
        subsets = c.provenance if c.kind in ("gprime", "double-subset", "underline") else None
    else:
        g, kind, subsets = c, "graph", None
    entries, dag_edges = _component_entries(g, subsets)
    key = lambda e: json.dumps(e, sort_keys=True)
    return InvariantReport(kind, len(g.vertices), len(g.edges), tuple(periodic_counts(g, K)),
                           tuple(sorted(entries, key=key)), _dag_hash(entries, dag_edges))


def conjugacy_signature(c: Cover | LabeledGraph, K: int = 8) -> tuple:
    """Component data that conjugacies of the cover edge shift preserve.

    Each recurrent component contributes its own periodic counts, multiplicity
    and terminal/source flags; the DAG is recorded on those keys.
    """
    g = c.graph if isinstance(c, Cover) else c
    subsets = c.provenance if isinstance(c, Cover) and c.kind in (
        "gprime", "double-subset", "underline") else None
    dag = components(g, subsets=subsets)
    keys = []
    for i, comp in enumerate(dag.components):
        sub = induced_subgraph(g, comp)
        keys.append(json.dumps({"periodic": periodic_counts(sub, K),
                                "multiplicity": dag.multiplicity[i] if dag.multiplicity else None,
                                "terminal": dag.terminal[i], "source": dag.source[i]},
                               sort_keys=True))
    return (tuple(sorted(keys)), tuple(sorted((keys[i], keys[j]) for i, j in dag.dag_edges)))


# -- canonicity ------------------------------------------------------------------------


def _rotate_alphabet(g: LabeledGraph) -> dict[str, str]:
    letters = list(g.alphabet)
    return {a: letters[(i + 1) % len(letters)] + "'" for i, a in enumerate(letters)}


def presentations(g: LabeledGraph) -> dict[str, tuple[LabeledGraph, bool]]:
    """Recoded presentations of ``g``; the flag says whether the shift itself is unchanged."""
    return {
        "original": (g, True),
        "higher_block_2": (higher_block(g, 2), True),
        "higher_block_3": (higher_block(g, 3), True),
        "relabel": (relabel(g, _rotate_alphabet(g)), False),
        "two_block_recoding": (higher_block(g, 2, label="block"), False),
    }


@dataclass
class CanonicityResult:
    passed: bool
    failures: list[str]
    reports: dict[str, dict[str, InvariantReport]]
    invariant_failures: list[str]

    def to_json(self) -> dict:
        return {"passed": self.passed, "failures": self.failures,
                "conjugacy_invariant_failures": self.invariant_failures,
                "reports": {p: {k: r.to_json() for k, r in rs.items()}
                            for p, rs in self.reports.items()}}


def canonicity_suite(g: LabeledGraph, K: int = 8) -> CanonicityResult:
    """Compare Krieger and G′ covers across recoded presentations of the shift.

    ``failures`` uses the full report (periodic counts plus component sizes);
    ``invariant_failures`` uses only periodic counts and the conjugacy-invariant
    component signature.
    """
    base_k = krieger_cover(g)
    failures: list[str] = []
    inv_failures: list[str] = []
    reports: dict[str, dict[str, InvariantReport]] = {}
    ref: dict[str, tuple] = {}
    for name, (p, same_shift) in presentations(g).items():
        K_p = krieger_cover(p)
        covers = {"krieger": K_p, "gprime": gprime_cover(K_p.graph)}
        reports[name] = {k: invariant_report(c, K) for k, c in covers.items()}
        if same_shift and graphs_isomorphic(K_p.graph, base_k.graph) is None:
            failures.append(f"{name}: krieger cover not isomorphic to the original's")
        for kind, cov in covers.items():
            rep = reports[name][kind]
            sig = conjugacy_signature(cov, K)
            if name == "original":
                ref[kind] = (rep, sig)
                continue
            ref_rep, ref_sig = ref[kind]
            if rep.periodic != ref_rep.periodic:
                failures.append(f"{name}/{kind}: periodic counts {list(rep.periodic)} "
                                f"!= {list(ref_rep.periodic)}")
                inv_failures.append(f"{name}/{kind}: periodic counts differ")
            if rep.signature != ref_rep.signature:
                failures.append(f"{name}/{kind}: component signature differs")
            if sig != ref_sig:
                inv_failures.append(f"{name}/{kind}: conjugacy signature differs")
    return CanonicityResult(not failures, failures, reports, inv_failures)
