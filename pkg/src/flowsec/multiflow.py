"""Coexisting typed data flows over shared entities.

Real networks carry several kinds of traffic at once; pooling all channels
into one flow relation can collapse most of the network into a handful of
equivalence classes. The fix is to declare one flow type per kind of data and
split each trusted entity into per-type parts that keep the flows separate.
This module models such typed networks, analyzes each flow independently, and
shows what the naive merge would have done.

Parts of one entity do not communicate by default. Declared intra-entity
rules record that data may cross between two parts after a named
transformation (sanitation, encryption, anonymization, ...); the
transformation is opaque metadata here -- the type conversion is recorded,
never executed -- so rules do not enter the flow analyses.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import (
    DuplicateEntityError,
    PartNameClashError,
    UnknownEndpointError,
    UnknownEntityError,
    UnknownFlowTypeError,
)
from .network import CondensationPoset, build_network, condense


@dataclass(frozen=True)
class IntraRule:
    """Declared data movement between two parts of one trusted entity."""

    entity: str
    source_part: str
    target_part: str
    transform: str


class TypedNetwork:
    """Entities with per-flow-type parts and per-type channel relations.

    An unsplit entity acts as its own part in every flow type. Part names are
    globally unique and always traceable back to their (entity, flow type)
    pair. Channels of a flow type connect only parts of that type.
    """

    __slots__ = (
        "flow_types",
        "base_entities",
        "parts",
        "per_type_channels",
        "intra_rules",
        "_base_of",
        "_entity_set",
    )

    def __init__(
        self,
        flow_types: tuple[str, ...],
        base_entities: tuple[str, ...],
        parts: dict[tuple[str, str], str],
        per_type_channels: dict[str, frozenset[tuple[str, str]]],
        intra_rules: frozenset[IntraRule],
    ):
        self.flow_types = flow_types
        self.base_entities = base_entities
        self.parts = parts
        self.per_type_channels = per_type_channels
        self.intra_rules = intra_rules
        self._entity_set = frozenset(base_entities)
        base_of = {name: name for name in base_entities}
        for (entity, _ftype), part in parts.items():
            base_of[part] = entity
        self._base_of = base_of

    def part_of(self, entity: str, ftype: str) -> str:
        """The node representing an entity inside one flow type."""
        if entity not in self._entity_set:
            raise UnknownEntityError(f"unknown entity {entity!r}")
        if ftype not in self.per_type_channels:
            raise UnknownFlowTypeError(f"unknown flow type {ftype!r}")
        return self.parts.get((entity, ftype), entity)

    def base_of(self, part: str) -> str:
        """The entity a part (or an unsplit entity) belongs to."""
        try:
            return self._base_of[part]
        except KeyError:
            raise UnknownEntityError(f"unknown part or entity {part!r}") from None

    def parts_for(self, ftype: str) -> tuple[str, ...]:
        """Every entity's part for one flow type, in entity order."""
        return tuple(self.part_of(e, ftype) for e in self.base_entities)

    def participants_for(self, ftype: str) -> tuple[str, ...]:
        """Parts that take part in one flow type, in entity order.

        An entity participates when it was explicitly split for the type or
        when its part touches one of the type's channels; unrelated entities
        stay out of that flow's analysis.
        """
        endpoints = {node for pair in self.per_type_channels[ftype] for node in pair}
        out = []
        for entity in self.base_entities:
            part = self.part_of(entity, ftype)
            if (entity, ftype) in self.parts or part in endpoints:
                out.append(part)
        return tuple(out)

    def channels_for(self, ftype: str) -> frozenset[tuple[str, str]]:
        try:
            return self.per_type_channels[ftype]
        except KeyError:
            raise UnknownFlowTypeError(f"unknown flow type {ftype!r}") from None

    def is_split(self, entity: str, ftype: str) -> bool:
        return (entity, ftype) in self.parts

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TypedNetwork):
            return NotImplemented
        return (
            self.flow_types == other.flow_types
            and self.base_entities == other.base_entities
            and self.parts == other.parts
            and self.per_type_channels == other.per_type_channels
            and self.intra_rules == other.intra_rules
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return (
            f"TypedNetwork({len(self.base_entities)} entities, "
            f"{len(self.flow_types)} flow types, {len(self.parts)} parts)"
        )


def build_typed_network(
    flow_types: Iterable[str],
    entities: Iterable[str],
    parts: Iterable[tuple[str, str, str]] = (),
    channels: Iterable[tuple[str, str, str]] = (),
    intra_rules: Iterable[IntraRule | tuple[str, str, str, str]] = (),
) -> TypedNetwork:
    """Validate and build a TypedNetwork.

    Args:
        flow_types: flow type names.
        entities: base entity names.
        parts: (entity, flow_type, part_name) split declarations.
        channels: (flow_type, source_part, target_part) triples; endpoints
            must be parts of that flow type (an unsplit entity stands for
            its own part).
        intra_rules: (entity, source_part, target_part, transform) records;
            both parts must belong to that entity.

    Raises:
        DuplicateEntityError, UnknownEntityError, UnknownFlowTypeError,
        PartNameClashError, UnknownEndpointError: see each message.
    """
    types = tuple(flow_types)
    seen_types = set()
    for t in types:
        if t in seen_types:
            raise DuplicateEntityError(f"flow type {t!r} declared more than once")
        seen_types.add(t)
    ents = tuple(entities)
    seen = set()
    for name in ents:
        if name in seen:
            raise DuplicateEntityError(f"entity {name!r} declared more than once")
        seen.add(name)

    part_map: dict[tuple[str, str], str] = {}
    taken = set(seen)
    for entity, ftype, part in parts:
        if entity not in seen:
            raise UnknownEntityError(f"unknown entity {entity!r}")
        if ftype not in seen_types:
            raise UnknownFlowTypeError(f"unknown flow type {ftype!r}")
        if (entity, ftype) in part_map:
            raise PartNameClashError(
                f"entity {entity!r} already has a part for flow type {ftype!r}"
            )
        if part in taken:
            raise PartNameClashError(f"part name {part!r} is not fresh")
        part_map[(entity, ftype)] = part
        taken.add(part)

    per_type: dict[str, set[tuple[str, str]]] = {t: set() for t in types}
    type_nodes = {
        t: {part_map.get((e, t), e) for e in ents} for t in types
    }
    for ftype, src, dst in channels:
        if ftype not in seen_types:
            raise UnknownFlowTypeError(f"unknown flow type {ftype!r}")
        for endpoint in (src, dst):
            if endpoint not in type_nodes[ftype]:
                raise UnknownEndpointError(
                    f"{endpoint!r} is not a part of flow type {ftype!r}"
                )
        per_type[ftype].add((src, dst))

    rules = set()
    for rule in intra_rules:
        if not isinstance(rule, IntraRule):
            rule = IntraRule(*rule)
        if rule.entity not in seen:
            raise UnknownEntityError(f"unknown entity {rule.entity!r}")
        own_parts = {part_map.get((rule.entity, t), rule.entity) for t in types}
        for endpoint in (rule.source_part, rule.target_part):
            if endpoint not in own_parts:
                raise ValueError(
                    f"{endpoint!r} is not a part of entity {rule.entity!r}"
                )
        if rule.source_part == rule.target_part:
            raise ValueError("intra-entity rules connect two distinct parts")
        rules.add(rule)

    return TypedNetwork(
        types,
        ents,
        part_map,
        {t: frozenset(pairs) for t, pairs in per_type.items()},
        frozenset(rules),
    )


def split_entity(
    tn: TypedNetwork, entity: str, assignments: Mapping[str, str]
) -> TypedNetwork:
    """Split a trusted entity into named per-flow-type parts.

    Channels of each assigned flow type that touched the entity (through its
    current part) are re-pointed at the new part; other flow types keep the
    entity as-is. Intra-entity rules naming a replaced part follow it.

    Args:
        tn: the network to derive from (left untouched).
        entity: the entity to split.
        assignments: flow type -> fresh part name.

    Raises:
        UnknownEntityError: entity not declared.
        UnknownFlowTypeError: an assignment names an undeclared flow type.
        PartNameClashError: a part name is not fresh.
    """
    if entity not in tn._entity_set:
        raise UnknownEntityError(f"unknown entity {entity!r}")
    taken = set(tn.base_entities) | set(tn.parts.values())
    renames: dict[tuple[str, str], str] = {}  # (ftype, old part) -> new part
    new_parts = dict(tn.parts)
    for ftype, part in assignments.items():
        if ftype not in tn.per_type_channels:
            raise UnknownFlowTypeError(f"unknown flow type {ftype!r}")
        if part in taken:
            raise PartNameClashError(f"part name {part!r} is not fresh")
        taken.add(part)
        renames[(ftype, tn.part_of(entity, ftype))] = part
        new_parts[(entity, ftype)] = part

    new_channels = {
        t: frozenset(
            (renames.get((t, a), a), renames.get((t, b), b)) for a, b in pairs
        )
        for t, pairs in tn.per_type_channels.items()
    }

    # Rules name concrete parts, so they only move when their old part name
    # vanishes; if several assignments retire the same old name to different
    # new ones, following the rule would be guesswork.
    remaining = {new_parts.get((entity, t), entity) for t in tn.flow_types}

    def follow(node: str) -> str:
        if node in remaining:
            return node
        targets = {new for (_t, old), new in renames.items() if old == node}
        if len(targets) > 1:
            raise ValueError(
                f"intra-entity rule endpoint {node!r} was split into several "
                f"parts; re-declare the rule against one of them"
            )
        return next(iter(targets)) if targets else node

    new_rules = frozenset(
        IntraRule(r.entity, follow(r.source_part), follow(r.target_part), r.transform)
        if r.entity == entity
        else r
        for r in tn.intra_rules
    )
    return TypedNetwork(
        tn.flow_types, tn.base_entities, new_parts, new_channels, new_rules
    )


@dataclass(eq=True)
class MultiflowReport:
    """Per-type flow posets next to the naive merged analysis.

    ``collapsed_classes`` holds indices of merged-poset classes that absorb
    two or more classes of at least one per-type poset -- the collapse that
    splitting trusted entities is meant to prevent.
    """

    per_type_posets: dict[str, CondensationPoset]
    merged_poset: CondensationPoset
    collapsed_classes: frozenset[int]


def analyze(tn: TypedNetwork) -> MultiflowReport:
    """Analyze each flow type separately and the union with parts re-identified.

    Per-type posets live on that type's participating parts and coincide with
    an independent analysis of that type's channel set alone. The merged
    poset re-identifies every part with its base entity and pools all
    channels, as if everything were one data flow; it covers every entity
    participating in at least one flow type.
    """
    per_type: dict[str, CondensationPoset] = {}
    involved: set[str] = set()
    for ftype in tn.flow_types:
        nodes = tn.participants_for(ftype)
        per_type[ftype] = condense(build_network(nodes, tn.channels_for(ftype)))
        involved.update(tn.base_of(p) for p in nodes)

    merged_channels = {
        (tn.base_of(a), tn.base_of(b))
        for ftype in tn.flow_types
        for a, b in tn.channels_for(ftype)
    }
    merged_entities = tuple(e for e in tn.base_entities if e in involved)
    merged = condense(build_network(merged_entities, merged_channels))

    collapsed: set[int] = set()
    for ftype, poset in per_type.items():
        absorbed: dict[int, int] = {}
        for members in poset.classes:
            target = merged.class_of[tn.base_of(members[0])]
            absorbed[target] = absorbed.get(target, 0) + 1
        collapsed.update(c for c, count in absorbed.items() if count >= 2)

    return MultiflowReport(per_type, merged, frozenset(collapsed))
