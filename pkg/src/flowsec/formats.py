"""Text formats for networks, labels, level posets, tuple labels, and typed networks.

The grammar is line-oriented so documents diff cleanly:

    # comment, anywhere on a line
    entity A                 network / typed-network
    channel A B              network
    label A: B,C             labels (set may be empty: "label A:")
    level X < Y              level-poset / tuple-labels ("level X" declares alone)
    tuple A: SECRET; EUR,US  tuple-labels (categories optional)
    flowtype order           typed-network
    part E order Eord        typed-network
    tchannel order A B       typed-network

Names may not contain whitespace or any of ``: , < ; #``. A document's kind
is inferred from the directives it uses; mixing kinds is an error. Emitted
text is canonical (everything sorted), so emit(parse(text)) is stable and
parsing it back yields an equal document.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CycleError, DocumentSemanticError, DocumentSyntaxError
from .labeling import LabelAssignment
from .levels import LevelPoset, TupleLabel, level_poset
from .multiflow import MultiflowReport, TypedNetwork, build_typed_network
from .network import CondensationPoset, Network, build_network

_DIRECTIVES = {
    "entity",
    "channel",
    "label",
    "level",
    "tuple",
    "flowtype",
    "part",
    "tchannel",
}

KINDS = ("network", "labels", "level-poset", "tuple-labels", "typed-network")

_ALLOWED = {
    "network": {"entity", "channel"},
    "labels": {"label"},
    "level-poset": {"level"},
    "tuple-labels": {"tuple", "level"},
    "typed-network": {"entity", "flowtype", "part", "tchannel"},
}

_FORBIDDEN_CHARS = set(":,<;#")


@dataclass
class TupleLabeling:
    """A level poset together with per-entity tuple labels."""

    levels: LevelPoset
    labels: dict[str, TupleLabel]


@dataclass
class Document:
    """A parsed document: its kind plus the corresponding payload.

    Payload types by kind: network -> Network, labels -> dict[str, frozenset],
    level-poset -> LevelPoset, tuple-labels -> TupleLabeling,
    typed-network -> TypedNetwork.
    """

    kind: str
    payload: object


def _name_problem(token: str) -> str | None:
    if not token:
        return "empty name"
    for ch in token:
        if ch in _FORBIDDEN_CHARS or ch.isspace():
            return f"name {token!r} contains forbidden character {ch!r}"
    return None


def _check_name(token: str, lineno: int, raw: str) -> str:
    problem = _name_problem(token)
    if problem:
        raise DocumentSyntaxError(problem, lineno, _col(raw, token))
    return token


def _col(raw: str, token: str) -> int:
    at = raw.find(token) if token else -1
    return at + 1 if at >= 0 else 1


def _split_names(text: str, lineno: int, raw: str) -> list[str]:
    """Parse a comma-separated name list; empty text means the empty list."""
    if not text.strip():
        return []
    return [_check_name(part.strip(), lineno, raw) for part in text.split(",")]


class _Row:
    __slots__ = ("lineno", "keyword", "rest", "raw")

    def __init__(self, lineno: int, keyword: str, rest: str, raw: str):
        self.lineno = lineno
        self.keyword = keyword
        self.rest = rest
        self.raw = raw

    def names(self, count: int) -> list[str]:
        tokens = self.rest.split()
        if len(tokens) != count:
            raise DocumentSyntaxError(
                f"{self.keyword!r} takes {count} name(s), got {len(tokens)}",
                self.lineno,
                _col(self.raw, self.keyword),
            )
        return [_check_name(t, self.lineno, self.raw) for t in tokens]

    def colon_head(self) -> tuple[str, str]:
        """Split ``NAME: rest`` and return (name, rest)."""
        head, sep, tail = self.rest.partition(":")
        if not sep:
            raise DocumentSyntaxError(
                f"{self.keyword!r} expects 'NAME: ...'",
                self.lineno,
                _col(self.raw, self.keyword),
            )
        return _check_name(head.strip(), self.lineno, self.raw), tail.strip()


def parse(text: str) -> Document:
    """Parse a document, inferring its kind from the directives used.

    Raises:
        DocumentSyntaxError: unknown directives, malformed lines, bad names.
        DocumentSemanticError: inconsistent declarations (duplicates, unknown
            references, cyclic level orders, directives of another kind).
    """
    rows: list[_Row] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        head, _, tail = body.strip().partition(" ")
        if head not in _DIRECTIVES:
            raise DocumentSyntaxError(
                f"unknown directive {head!r}", lineno, _col(raw, head)
            )
        rows.append(_Row(lineno, head, tail.strip(), raw))

    used = {row.keyword for row in rows}
    if "tuple" in used:
        kind = "tuple-labels"
    elif used & {"flowtype", "part", "tchannel"}:
        kind = "typed-network"
    elif "label" in used:
        kind = "labels"
    elif "level" in used:
        kind = "level-poset"
    else:
        kind = "network"
    for row in rows:
        if row.keyword not in _ALLOWED[kind]:
            raise DocumentSemanticError(
                f"directive {row.keyword!r} does not belong in a {kind} document",
                row.lineno,
                _col(row.raw, row.keyword),
            )

    if kind == "network":
        return Document(kind, _assemble_network(rows))
    if kind == "labels":
        return Document(kind, _assemble_labels(rows))
    if kind == "level-poset":
        return Document(kind, _assemble_levels(rows))
    if kind == "tuple-labels":
        return Document(kind, _assemble_tuples(rows))
    return Document(kind, _assemble_typed(rows))


def _assemble_network(rows: list[_Row]) -> Network:
    entities: list[str] = []
    seen: set[str] = set()
    for row in rows:
        if row.keyword == "entity":
            (name,) = row.names(1)
            if name in seen:
                raise DocumentSemanticError(
                    f"entity {name!r} declared more than once",
                    row.lineno,
                    _col(row.raw, name),
                )
            seen.add(name)
            entities.append(name)
    channels: list[tuple[str, str]] = []
    for row in rows:
        if row.keyword == "channel":
            a, b = row.names(2)
            for name in (a, b):
                if name not in seen:
                    raise DocumentSemanticError(
                        f"channel endpoint {name!r} is not a declared entity",
                        row.lineno,
                        _col(row.raw, name),
                    )
            channels.append((a, b))
    return build_network(entities, channels)


def _assemble_labels(rows: list[_Row]) -> dict[str, frozenset[str]]:
    labels: dict[str, frozenset[str]] = {}
    for row in rows:
        name, tail = row.colon_head()
        if name in labels:
            raise DocumentSemanticError(
                f"entity {name!r} labeled more than once", row.lineno, _col(row.raw, name)
            )
        labels[name] = frozenset(_split_names(tail, row.lineno, row.raw))
    return labels


def _parse_level_row(row: _Row) -> tuple[str, str] | str:
    if "<" in row.rest:
        low, _, high = row.rest.partition("<")
        return (
            _check_name(low.strip(), row.lineno, row.raw),
            _check_name(high.strip(), row.lineno, row.raw),
        )
    (name,) = row.names(1)
    return name


def _assemble_levels(rows: list[_Row]) -> LevelPoset:
    covers: list[tuple[str, str]] = []
    isolated: list[str] = []
    for row in rows:
        item = _parse_level_row(row)
        if isinstance(item, tuple):
            covers.append(item)
            try:
                level_poset(covers)
            except CycleError as exc:
                raise DocumentSemanticError(str(exc), row.lineno) from None
        else:
            isolated.append(item)
    return level_poset(covers, isolated)


def _assemble_tuples(rows: list[_Row]) -> TupleLabeling:
    levels = _assemble_levels([r for r in rows if r.keyword == "level"])
    labels: dict[str, TupleLabel] = {}
    for row in rows:
        if row.keyword != "tuple":
            continue
        name, tail = row.colon_head()
        if name in labels:
            raise DocumentSemanticError(
                f"entity {name!r} labeled more than once", row.lineno, _col(row.raw, name)
            )
        level_part, sep, cats_part = tail.partition(";")
        level = _check_name(level_part.strip(), row.lineno, row.raw)
        if level not in levels:
            raise DocumentSemanticError(
                f"unknown security level {level!r}", row.lineno, _col(row.raw, level)
            )
        cats = _split_names(cats_part, row.lineno, row.raw) if sep else []
        labels[name] = TupleLabel(level, frozenset(cats))
    return TupleLabeling(levels, labels)


def _assemble_typed(rows: list[_Row]) -> TypedNetwork:
    entities: list[str] = []
    flow_types: list[str] = []
    seen_entities: set[str] = set()
    seen_types: set[str] = set()
    for row in rows:
        if row.keyword == "entity":
            (name,) = row.names(1)
            if name in seen_entities:
                raise DocumentSemanticError(
                    f"entity {name!r} declared more than once",
                    row.lineno,
                    _col(row.raw, name),
                )
            seen_entities.add(name)
            entities.append(name)
        elif row.keyword == "flowtype":
            (name,) = row.names(1)
            if name in seen_types:
                raise DocumentSemanticError(
                    f"flow type {name!r} declared more than once",
                    row.lineno,
                    _col(row.raw, name),
                )
            seen_types.add(name)
            flow_types.append(name)

    parts: list[tuple[str, str, str]] = []
    part_names: set[str] = set(seen_entities)
    assigned: set[tuple[str, str]] = set()
    for row in rows:
        if row.keyword != "part":
            continue
        entity, ftype, part = row.names(3)
        if entity not in seen_entities:
            raise DocumentSemanticError(
                f"unknown entity {entity!r}", row.lineno, _col(row.raw, entity)
            )
        if ftype not in seen_types:
            raise DocumentSemanticError(
                f"unknown flow type {ftype!r}", row.lineno, _col(row.raw, ftype)
            )
        if (entity, ftype) in assigned:
            raise DocumentSemanticError(
                f"entity {entity!r} already has a part for flow type {ftype!r}",
                row.lineno,
                _col(row.raw, part),
            )
        if part in part_names:
            raise DocumentSemanticError(
                f"part name {part!r} is not fresh", row.lineno, _col(row.raw, part)
            )
        assigned.add((entity, ftype))
        part_names.add(part)
        parts.append((entity, ftype, part))

    part_of = {(e, t): p for e, t, p in parts}
    channels: list[tuple[str, str, str]] = []
    for row in rows:
        if row.keyword != "tchannel":
            continue
        ftype, src, dst = row.names(3)
        if ftype not in seen_types:
            raise DocumentSemanticError(
                f"unknown flow type {ftype!r}", row.lineno, _col(row.raw, ftype)
            )
        nodes = {part_of.get((e, ftype), e) for e in entities}
        for endpoint in (src, dst):
            if endpoint not in nodes:
                raise DocumentSemanticError(
                    f"{endpoint!r} is not a part of flow type {ftype!r}",
                    row.lineno,
                    _col(row.raw, endpoint),
                )
        channels.append((ftype, src, dst))

    return build_typed_network(flow_types, entities, parts, channels)


# -- emission -----------------------------------------------------------------


def _require_name(token: str) -> str:
    problem = _name_problem(token)
    if problem:
        raise ValueError(f"cannot serialize: {problem}")
    return token


def emit(doc: Document) -> str:
    """Render a document canonically: sorted lines, stable across runs.

    Raises:
        ValueError: a name in the payload cannot appear in the grammar.
    """
    lines: list[str] = []
    if doc.kind == "network":
        net: Network = doc.payload  # type: ignore[assignment]
        lines += [f"entity {_require_name(e)}" for e in sorted(net.entities)]
        lines += [
            f"channel {_require_name(a)} {_require_name(b)}"
            for a, b in sorted(net.channels)
        ]
    elif doc.kind == "labels":
        mapping: dict[str, frozenset[str]] = doc.payload  # type: ignore[assignment]
        for name in sorted(mapping):
            members = ",".join(_require_name(m) for m in sorted(mapping[name]))
            lines.append(f"label {_require_name(name)}:" + (f" {members}" if members else ""))
    elif doc.kind == "level-poset":
        lines += _level_lines(doc.payload)  # type: ignore[arg-type]
    elif doc.kind == "tuple-labels":
        tl: TupleLabeling = doc.payload  # type: ignore[assignment]
        lines += _level_lines(tl.levels)
        for name in sorted(tl.labels):
            label = tl.labels[name]
            line = f"tuple {_require_name(name)}: {_require_name(label.level)}"
            if label.categories:
                line += "; " + ",".join(
                    _require_name(c) for c in sorted(label.categories)
                )
            lines.append(line)
    elif doc.kind == "typed-network":
        tn: TypedNetwork = doc.payload  # type: ignore[assignment]
        lines += [f"entity {_require_name(e)}" for e in sorted(tn.base_entities)]
        lines += [f"flowtype {_require_name(t)}" for t in sorted(tn.flow_types)]
        lines += [
            f"part {_require_name(e)} {_require_name(t)} {_require_name(p)}"
            for (e, t), p in sorted(tn.parts.items())
        ]
        lines += [
            f"tchannel {_require_name(t)} {_require_name(a)} {_require_name(b)}"
            for t in sorted(tn.per_type_channels)
            for a, b in sorted(tn.per_type_channels[t])
        ]
    else:
        raise ValueError(f"unknown document kind {doc.kind!r}")
    return "".join(line + "\n" for line in lines)


def _level_lines(levels: LevelPoset) -> list[str]:
    covers = levels.covers()
    in_covers = {name for pair in covers for name in pair}
    lines = [
        f"level {_require_name(name)}"
        for name in levels.levels
        if name not in in_covers
    ]
    lines += [
        f"level {_require_name(a)} < {_require_name(b)}" for a, b in covers
    ]
    return lines


def parse_tuple_literal(text: str, levels: LevelPoset) -> TupleLabel:
    """Parse an inline ``LEVEL;cat1,cat2`` argument (categories optional)."""
    level_part, sep, cats_part = text.partition(";")
    level = level_part.strip()
    problem = _name_problem(level)
    if problem:
        raise DocumentSyntaxError(problem, 1)
    if level not in levels:
        raise DocumentSemanticError(f"unknown security level {level!r}", 1)
    cats = []
    if sep and cats_part.strip():
        for token in cats_part.split(","):
            token = token.strip()
            problem = _name_problem(token)
            if problem:
                raise DocumentSyntaxError(problem, 1)
            cats.append(token)
    return TupleLabel(level, frozenset(cats))


# -- analysis rendering -------------------------------------------------------


def bracket(members: tuple[str, ...]) -> str:
    """Render a class as ``[A,G]``."""
    return "[" + ",".join(members) + "]"


def format_poset(poset: CondensationPoset) -> str:
    """Class listing plus the cover edges of the order, canonically sorted."""
    lines = [f"class {bracket(members)}" for members in poset.classes]
    lines += [
        f"leq {bracket(poset.classes[i])} {bracket(poset.classes[j])}"
        for i, j in poset.covers()
    ]
    return "".join(line + "\n" for line in lines)


def format_classes(poset: CondensationPoset, indices) -> str:
    """One bracketed class per line, in canonical class order."""
    return "".join(
        f"{bracket(poset.classes[c])}\n" for c in sorted(indices)
    )


def to_dot(poset: CondensationPoset, labels: LabelAssignment | None = None) -> str:
    """Render the class order as a DOT digraph.

    Greater elements sit above smaller ones (rank direction bottom-to-top),
    edges are the covers only, and reflexive edges are omitted. With labels,
    nodes read ``[B,F,H] : B,F,H``.
    """

    def esc(text: str) -> str:
        return text.replace("\\", "\\\\").replace('"', '\\"')

    lines = ["digraph condensation {", "  rankdir=BT;"]
    for c, members in enumerate(poset.classes):
        node = bracket(members)
        if labels is None:
            lines.append(f'  "{esc(node)}";')
        else:
            text = f"{node} : {','.join(sorted(labels.class_label(c)))}"
            lines.append(f'  "{esc(node)}" [label="{esc(text)}"];')
    for i, j in poset.covers():
        lines.append(
            f'  "{esc(bracket(poset.classes[i]))}" -> "{esc(bracket(poset.classes[j]))}";'
        )
    lines.append("}")
    return "".join(line + "\n" for line in lines)


def format_multiflow(report: MultiflowReport, tn: TypedNetwork) -> str:
    """Human-readable multiflow report; parts are traced to base entities."""

    def annotated(members: tuple[str, ...]) -> str:
        bases = sorted({tn.base_of(p) for p in members})
        if list(members) == bases:
            return bracket(members)
        return f"{bracket(members)} (entities: {','.join(bases)})"

    lines: list[str] = []
    for ftype in sorted(report.per_type_posets):
        poset = report.per_type_posets[ftype]
        lines.append(f"flowtype {ftype}:")
        lines += [f"  class {annotated(members)}" for members in poset.classes]
        lines += [
            f"  leq {bracket(poset.classes[i])} {bracket(poset.classes[j])}"
            for i, j in poset.covers()
        ]
    lines.append("merged:")
    lines += [f"  class {bracket(members)}" for members in report.merged_poset.classes]
    lines += [
        f"  leq {bracket(report.merged_poset.classes[i])} "
        f"{bracket(report.merged_poset.classes[j])}"
        for i, j in report.merged_poset.covers()
    ]
    lines.append("collapsed:")
    lines += [
        f"  class {bracket(report.merged_poset.classes[c])}"
        for c in sorted(report.collapsed_classes)
    ]
    return "".join(line + "\n" for line in lines)
