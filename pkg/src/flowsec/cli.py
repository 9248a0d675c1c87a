"""Command-line interface: every analysis as a subcommand over document files.

Exit codes: 0 on success (and on "true" answers), 1 when a query subcommand
answers false or reports a violation (query-flow/implementation/tuple-leq
false, or conflict true), 2 on usage and input errors.

Poset-consuming subcommands accept either a network document (condensed
first) or a labels document (reconstructed by inclusion); pass ``-`` to read
from standard input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import IO

from .errors import FlowsecError
from .formats import (
    Document,
    TupleLabeling,
    bracket,
    emit,
    format_classes,
    format_multiflow,
    format_poset,
    parse,
    parse_tuple_literal,
    to_dot,
)
from .labeling import compute_labels, flow_from_labels
from .levels import LevelPoset, tuple_leq, tuple_to_set
from .multiflow import analyze
from .network import (
    CondensationPoset,
    Network,
    channels_from_flow,
    condense,
    flow_between,
    transitive_closure,
    transitive_reduction,
)
from .security import in_conflict, is_implementation, max_integrity_classes, max_secrecy_classes


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _load(path: str) -> Document:
    return parse(_read(path))


def _expect(doc: Document, *kinds: str) -> None:
    if doc.kind not in kinds:
        raise FlowsecError(
            f"expected a {' or '.join(kinds)} document, got {doc.kind}"
        )


def _as_network(doc: Document) -> Network:
    _expect(doc, "network")
    return doc.payload  # type: ignore[return-value]


def _as_poset(doc: Document) -> CondensationPoset:
    _expect(doc, "network", "labels")
    if doc.kind == "network":
        return condense(doc.payload)  # type: ignore[arg-type]
    return flow_from_labels(doc.payload)  # type: ignore[arg-type]


def _as_levels(doc: Document) -> LevelPoset:
    _expect(doc, "level-poset", "tuple-labels")
    if doc.kind == "level-poset":
        return doc.payload  # type: ignore[return-value]
    return doc.payload.levels  # type: ignore[union-attr]


def _answer(value: bool, out: IO[str]) -> int:
    print("true" if value else "false", file=out)
    return 0 if value else 1


# -- subcommand handlers ------------------------------------------------------


def _cmd_closure(args, out, err) -> int:
    net = _as_network(_load(args.file))
    saturated = channels_from_flow(transitive_closure(net))
    out.write(emit(Document("network", saturated)))
    return 0


def _cmd_condense(args, out, err) -> int:
    out.write(format_poset(_as_poset(_load(args.file))))
    return 0


def _cmd_labels(args, out, err) -> int:
    labels = compute_labels(_as_poset(_load(args.file)))
    out.write(emit(Document("labels", labels.entity_labels())))
    return 0


def _cmd_reduce(args, out, err) -> int:
    reduced = transitive_reduction(_as_poset(_load(args.file)))
    out.write(emit(Document("network", reduced)))
    return 0


def _cmd_from_labels(args, out, err) -> int:
    doc = _load(args.file)
    _expect(doc, "labels")
    mapping = doc.payload
    for name in sorted(mapping):  # type: ignore[arg-type]
        if name not in mapping[name]:  # type: ignore[index]
            print(f"warning: label of {name} does not contain {name}", file=err)
    out.write(format_poset(flow_from_labels(mapping)))  # type: ignore[arg-type]
    return 0


def _cmd_query_flow(args, out, err) -> int:
    poset = _as_poset(_load(args.file))
    return _answer(flow_between(poset, args.source, args.target), out)


def _cmd_secrecy(args, out, err) -> int:
    poset = _as_poset(_load(args.file))
    out.write(format_classes(poset, max_secrecy_classes(poset)))
    return 0


def _cmd_integrity(args, out, err) -> int:
    poset = _as_poset(_load(args.file))
    out.write(format_classes(poset, max_integrity_classes(poset)))
    return 0


def _cmd_conflict(args, out, err) -> int:
    poset = _as_poset(_load(args.file))
    conflicted = in_conflict(poset, args.entities)
    print("true" if conflicted else "false", file=out)
    return 1 if conflicted else 0


def _cmd_implementation(args, out, err) -> int:
    candidate = _as_network(_load(args.candidate))
    poset = _as_poset(_load(args.reference))
    return _answer(is_implementation(candidate, poset), out)


def _cmd_tuple_leq(args, out, err) -> int:
    levels = _as_levels(_load(args.file))
    a = parse_tuple_literal(args.left, levels)
    b = parse_tuple_literal(args.right, levels)
    return _answer(tuple_leq(a, b, levels), out)


def _cmd_tuple_to_set(args, out, err) -> int:
    levels = _as_levels(_load(args.file))
    label = parse_tuple_literal(args.label, levels)
    names = tuple_to_set(label, levels).display()
    print(",".join(sorted(names)), file=out)
    return 0


def _cmd_multiflow(args, out, err) -> int:
    doc = _load(args.file)
    _expect(doc, "typed-network")
    out.write(format_multiflow(analyze(doc.payload), doc.payload))  # type: ignore[arg-type]
    return 0


def _cmd_dot(args, out, err) -> int:
    poset = _as_poset(_load(args.file))
    out.write(to_dot(poset, compute_labels(poset)))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flowsec",
        description="Data-flow security analysis over channel relations, "
        "flow posets, and set labels.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, handler, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=handler)
        return p

    p = add("closure", _cmd_closure, "emit the network with every derivable channel")
    p.add_argument("file", help="network document ('-' for stdin)")

    p = add("condense", _cmd_condense, "list equivalence classes and their order")
    p.add_argument("file", help="network or labels document")

    p = add("labels", _cmd_labels, "synthesize entity labels as a labels document")
    p.add_argument("file", help="network or labels document")

    p = add("reduce", _cmd_reduce, "emit a minimal network with the same flow order")
    p.add_argument("file", help="network or labels document")

    p = add("from-labels", _cmd_from_labels, "rebuild the class order from labels")
    p.add_argument("file", help="labels document")

    p = add("query-flow", _cmd_query_flow, "can data flow from SOURCE to TARGET?")
    p.add_argument("file", help="network or labels document")
    p.add_argument("source")
    p.add_argument("target")

    p = add("secrecy", _cmd_secrecy, "classes with no outgoing flows")
    p.add_argument("file", help="network or labels document")

    p = add("integrity", _cmd_integrity, "classes with no incoming flows")
    p.add_argument("file", help="network or labels document")

    p = add("conflict", _cmd_conflict, "do the entities lack a common flow target?")
    p.add_argument("file", help="network or labels document")
    p.add_argument("entities", nargs="+", metavar="ENTITY",
                   help="two or more entity names")

    p = add("implementation", _cmd_implementation,
            "does CANDIDATE realize exactly REFERENCE's flow order?")
    p.add_argument("candidate", help="network document")
    p.add_argument("reference", help="network or labels document")

    p = add("tuple-leq", _cmd_tuple_leq, "compare two tuple labels")
    p.add_argument("file", help="level-poset or tuple-labels document")
    p.add_argument("left", metavar='"LEVEL;cat,..."')
    p.add_argument("right", metavar='"LEVEL;cat,..."')

    p = add("tuple-to-set", _cmd_tuple_to_set, "translate a tuple label to a set label")
    p.add_argument("file", help="level-poset or tuple-labels document")
    p.add_argument("label", metavar='"LEVEL;cat,..."')

    p = add("multiflow", _cmd_multiflow, "analyze typed flows separately and merged")
    p.add_argument("file", help="typed-network document")

    p = add("dot", _cmd_dot, "render the labeled class order as DOT")
    p.add_argument("file", help="network or labels document")

    return parser


def run(argv=None, stdout: IO[str] | None = None, stderr: IO[str] | None = None) -> int:
    """Run the CLI; returns the exit code instead of exiting."""
    out = stdout if stdout is not None else sys.stdout
    err = stderr if stderr is not None else sys.stderr
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 0
    try:
        return args.func(args, out, err)
    except FlowsecError as exc:
        print(f"error: {exc}", file=err)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=err)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
