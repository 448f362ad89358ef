"""Command-line front end: ``soficov COMMAND INPUT [options]``.

Exit codes: 0 success or true, 1 property false or comparison negative,
2 input or usage error, 3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings

from .covers import (Cover, fischer_cover, follower_set_graph, is_irreducible,
                     is_predecessor_separated, is_synchronizing_word, krieger_cover,
                     regular_vertices, underline_graph)
from .errors import CapExceededError, ConsistencyError, SoficError
from .graph import (LabeledGraph, higher_block, parse_lg, relabel, reverse, serialize, trim,
                    validate)
from .gprime import asymptotic_components, gprime_cover
from .invariants import canonicity_suite, graphs_isomorphic, invariant_report, periodic_counts
from .lang import (as_word, contains_word, follower_partition, format_word, merged_graph,
                   separating_word)

EXIT_OK, EXIT_FALSE, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3

PROPERTIES = ("trim", "right-resolving", "regular", "follower-separated",
              "predecessor-separated", "irreducible", "synchronizing")


def read_graph(path: str) -> LabeledGraph:
    if path == "-":
        text = sys.stdin.read()
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        g = parse_lg(text)
    for w in caught:
        print(f"{path}: warning: {w.message}", file=sys.stderr)
    return g


def emit_graph(g: LabeledGraph, fmt: str, cover: Cover | None = None, extra: dict | None = None):
    if fmt == "json":
        data = json.loads(serialize(g, "json"))
        if cover is not None:
            data["cover"] = cover.kind
            data["provenance"] = {v: cover.describe(v) for v in g.vertices}
        if extra:
            data.update(extra)
        print(json.dumps(data, indent=2, sort_keys=True))
    else:
        sys.stdout.write(serialize(g, "dot" if fmt == "dot" else "lg"))
    return EXIT_OK


def select_cover(kind: str, g: LabeledGraph, route: str = "merge") -> Cover | LabeledGraph:
    if kind == "input":
        return g
    if kind == "krieger":
        return krieger_cover(g, route)
    if kind == "fischer":
        return fischer_cover(g)
    if kind == "gprime":
        return gprime_cover(g)
    raise ValueError(kind)


def _graph_of(c) -> LabeledGraph:
    return c.graph if isinstance(c, Cover) else c


# -- commands -----------------------------------------------------------------------


def cmd_parse(args):
    return emit_graph(read_graph(args.input), args.format)


def cmd_krieger(args):
    c = krieger_cover(read_graph(args.input), args.route)
    return emit_graph(c.graph, args.format, c, {"route": args.route})


def cmd_fischer(args):
    c = fischer_cover(read_graph(args.input))
    return emit_graph(c.graph, args.format, c)


def cmd_follower_graph(args):
    c = follower_set_graph(read_graph(args.input))
    return emit_graph(c.graph, args.format, c)


def cmd_underline(args):
    c = underline_graph(read_graph(args.input))
    return emit_graph(c.graph, args.format, c)


def cmd_gprime(args):
    g = read_graph(args.input)
    if args.base != "input":
        g = select_cover(args.base, g).graph
    bounded = args.selection == "bounded"
    sel = asymptotic_components(g, args.selection,
                                args.left_bound if bounded else None,
                                args.mid_bound if bounded else None,
                                args.right_bound if bounded else None)
    c = gprime_cover(g, sel)
    return emit_graph(c.graph, args.format, c, {"selection": sel.to_json()})


def cmd_check(args):
    g = read_graph(args.input)
    prop = args.property
    detail = ""
    if prop == "trim":
        ok = g.is_trim
    elif prop == "right-resolving":
        ok = g.is_right_resolving
    elif prop == "regular":
        irregular = sorted(set(g.vertices) - regular_vertices(g))
        ok = not irregular
        if irregular:
            detail = "; ".join(f"vertex {v} not regular" for v in irregular)
    elif prop == "follower-separated":
        part = follower_partition(g)
        ok = part.separated
        if not ok:
            detail = "classes " + " ".join("{" + ",".join(sorted(c)) + "}"
                                           for c in part.classes if len(c) > 1)
    elif prop == "predecessor-separated":
        ok = is_predecessor_separated(g)
    elif prop == "irreducible":
        ok = is_irreducible(g)
    else:
        if args.word is None:
            raise argparse.ArgumentTypeError("--property synchronizing needs --word")
        ok = is_synchronizing_word(g, as_word(args.word.split()) if " " in args.word
                                   else as_word(args.word))
    if args.format == "json":
        print(json.dumps({"property": prop, "value": ok, "detail": detail}, sort_keys=True))
    else:
        print(f"{prop}: {'true' if ok else 'false'}" + (f" ({detail})" if detail else ""))
    return EXIT_OK if ok else EXIT_FALSE


def cmd_invariants(args):
    g = read_graph(args.input)
    if args.canonicity:
        res = canonicity_suite(g, args.max_period)
        if args.format == "json":
            print(json.dumps(res.to_json(), indent=2, sort_keys=True))
        else:
            print("canonicity: pass" if res.passed else "canonicity: fail")
            for f in res.failures:
                print(f"  {f}")
        return EXIT_OK if res.passed else EXIT_FALSE
    rep = invariant_report(select_cover(args.cover, g, args.route), args.max_period)
    data = rep.to_json()
    data["max_period"] = args.max_period
    if args.format == "json":
        print(json.dumps(data, indent=2, sort_keys=True))
    else:
        print(f"cover: {rep.kind}")
        print(f"vertices: {rep.vertices}")
        print(f"edges: {rep.edges}")
        print(f"periodic: {' '.join(map(str, rep.periodic))}")
        for c in rep.components:
            flags = [k for k in ("terminal", "source") if c[k]]
            mult = "" if c["multiplicity"] is None else f" multiplicity {c['multiplicity']}"
            print(f"component: size {c['size']} edges {c['edges']}{mult}"
                  + (f" {' '.join(flags)}" if flags else ""))
        print(f"dag: {rep.dag}")
    return EXIT_OK


def cmd_compare(args):
    g1 = _graph_of(select_cover(args.cover, read_graph(args.first), args.route))
    g2 = _graph_of(select_cover(args.cover, read_graph(args.second), args.route))
    out: dict = {"mode": args.mode}
    if args.mode == "language":
        w = separating_word(g1, g2)
        out["equal"] = w is None
        if w is None:
            msg = "equal"
        else:
            side = "first" if contains_word(g1, w) else "second"
            out["witness"] = format_word(w)
            out["only_in"] = side
            msg = f"not equal (witness {format_word(w)} only in {side})"
    elif args.mode == "isomorphic":
        vm = graphs_isomorphic(g1, g2)
        out["equal"] = vm is not None
        if vm is None:
            if len(g1.vertices) != len(g2.vertices):
                msg = f"not isomorphic ({len(g1.vertices)} vs {len(g2.vertices)} vertices)"
            elif len(g1.edges) != len(g2.edges):
                msg = f"not isomorphic ({len(g1.edges)} vs {len(g2.edges)} edges)"
            else:
                msg = "not isomorphic"
        else:
            out["map"] = dict(sorted(vm.assignment.items()))
            msg = "isomorphic\n" + "\n".join(f"  {v} -> {w}" for v, w in sorted(vm.assignment.items()))
    else:
        p1, p2 = periodic_counts(g1, args.max_period), periodic_counts(g2, args.max_period)
        out["equal"] = p1 == p2
        out["periodic"] = [p1, p2]
        if p1 == p2:
            msg = f"equal up to period {args.max_period}"
        else:
            n = next(i for i, (a, b) in enumerate(zip(p1, p2)) if a != b) + 1
            out["first_difference"] = n
            msg = f"differ at period {n}: {p1[n - 1]} vs {p2[n - 1]}"
    if args.format == "json":
        print(json.dumps(out, indent=2, sort_keys=True))
    else:
        print(msg)
    return EXIT_OK if out["equal"] else EXIT_FALSE


def _parse_mapping(text: str) -> dict[str, str]:
    out = {}
    for item in text.split(","):
        if "=" not in item:
            raise argparse.ArgumentTypeError(f"bad mapping item {item!r}; expected OLD=NEW")
        a, b = item.split("=", 1)
        out[a.strip()] = b.strip()
    return out


def cmd_recode(args):
    g = read_graph(args.input)
    if args.higher_block is not None:
        g = higher_block(g, args.higher_block, label=args.label)
    if args.relabel is not None:
        g = relabel(g, _parse_mapping(args.relabel))
    if args.reverse:
        g = reverse(g)
    if args.merge:
        g = merged_graph(g)[0]
    if args.trim:
        g = trim(g)
    return emit_graph(g, args.format)


def cmd_validate(args):
    rep = validate(read_graph(args.input))
    data = {"trim": rep.trim, "right_resolving": rep.right_resolving, "vertices": rep.vertices,
            "edges": rep.edges, "alphabet": rep.alphabet}
    if args.format == "json":
        print(json.dumps(data, sort_keys=True))
    else:
        for k, v in data.items():
            print(f"{k}: {str(v).lower()}")
    return EXIT_OK


# -- parser --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="soficov",
        description="Canonical covers of sofic shifts presented by labeled graphs (.lg files).")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help_text, formats=("text", "json", "dot"), inputs=1):
        p = sub.add_parser(name, help=help_text, description=help_text)
        if inputs == 1:
            p.add_argument("input", help="input .lg file, or - for stdin")
        p.add_argument("--format", choices=formats, default="text")
        p.set_defaults(func=func)
        return p

    add("parse", cmd_parse, "normalize and re-emit a graph")
    p = add("krieger", cmd_krieger, "Krieger future cover")
    p.add_argument("--route", choices=("merge", "regular-part"), default="merge")
    add("fischer", cmd_fischer, "Fischer cover of an irreducible shift")
    add("follower-graph", cmd_follower_graph, "follower set graph of nonempty words")
    add("underline", cmd_underline, "graph on the sets D^y of left-infinite histories")

    p = add("gprime", cmd_gprime, "G-prime cover generated by backward asymptotic components")
    p.add_argument("--base", choices=("input", "krieger", "fischer"), default="input",
                   help="presentation to build from (default: the input itself)")
    p.add_argument("--selection", choices=("exact", "bounded"), default="exact")
    p.add_argument("--left-bound", type=int, default=6)
    p.add_argument("--mid-bound", type=int, default=6)
    p.add_argument("--right-bound", type=int, default=6)

    p = add("check", cmd_check, "test a property; exit 1 when false", formats=("text", "json"))
    p.add_argument("--property", choices=PROPERTIES, required=True)
    p.add_argument("--word", help="word for --property synchronizing (letters, or space separated)")

    p = add("invariants", cmd_invariants, "conjugacy-invariant report of a cover",
            formats=("text", "json"))
    p.add_argument("--cover", choices=("krieger", "fischer", "gprime", "input"), default="krieger")
    p.add_argument("--route", choices=("merge", "regular-part"), default="merge")
    p.add_argument("--max-period", type=int, default=8)
    p.add_argument("--canonicity", action="store_true",
                   help="run the recoding canonicity suite instead")

    p = add("compare", cmd_compare, "compare two presentations; exit 1 when they differ",
            formats=("text", "json"), inputs=0)
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--mode", choices=("language", "isomorphic", "periodic-counts"),
                   default="language")
    p.add_argument("--cover", choices=("input", "krieger", "fischer", "gprime"), default="input",
                   help="compare these covers of the inputs instead of the inputs")
    p.add_argument("--route", choices=("merge", "regular-part"), default="merge")
    p.add_argument("--max-period", type=int, default=8)

    p = add("recode", cmd_recode, "recode a presentation")
    p.add_argument("--higher-block", type=int, metavar="N")
    p.add_argument("--label", choices=("first", "last", "block"), default="first")
    p.add_argument("--relabel", metavar="MAP", help="alphabet bijection, e.g. 0=1,1=0")
    p.add_argument("--reverse", action="store_true")
    p.add_argument("--merge", action="store_true", help="merge vertices with equal followers")
    p.add_argument("--trim", action="store_true")

    add("validate", cmd_validate, "structural summary", formats=("text", "json"))
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConsistencyError:
        raise
    except CapExceededError as e:
        print(f"soficov: cap exceeded: {e}", file=sys.stderr)
        return EXIT_CAP
    except argparse.ArgumentTypeError as e:
        print(f"soficov: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (SoficError, OSError) as e:
        where = f"{getattr(args, 'input', '')}: " if getattr(args, "input", None) else ""
        print(f"soficov: {where}{e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
