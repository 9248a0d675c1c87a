"""Set labels for equivalence classes and entities.

A class's own label is the set of its members' names; its full label is the
union of own labels over every class that can flow into it. Labels encode
data provenance, and the class order is mirrored exactly by label inclusion:
data may flow from x to y iff the label of x is a subset of the label of y.
That inclusion order is also enough to reconstruct the poset from labels
alone, including labels supplied by a user rather than synthesized here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Union

from .errors import MissingLabelError, UnknownEntityError
from .levels import SetLabel
from .network import CondensationPoset, _iter_bits, _pack_mask

# Posets with at most this many entities get all label bitsets materialized
# up front; larger ones materialize per class on first access. The down-set
# masks that determine every label are always computed eagerly.
_EAGER_LABEL_LIMIT = 4096

LabelMap = Mapping[str, Union[frozenset, set, SetLabel]]


class LabelAssignment:
    """Labels for every class (and hence entity) of a condensation poset.

    Labels are bitsets indexed by the poset's entity order; they serialize as
    sorted name lists. ``includes`` answers label inclusion without
    materializing name sets, using the fact that labels are unions of
    disjoint own labels over down-sets.
    """

    __slots__ = (
        "poset",
        "_downsets",
        "_bit_class",
        "_masks",
        "_lazy",
        "_own",
        "_pos_cache",
    )

    def __init__(
        self,
        poset: CondensationPoset,
        downsets: tuple[int, ...],
        bit_class: tuple[int, ...],
        masks: list[int] | None,
    ):
        # Down-set masks use a topological bit layout (bit j stands for
        # class bit_class[j]); subset tests are unaffected and minimal
        # classes get small integers instead of full-width ones.
        self.poset = poset
        self._downsets = downsets
        self._bit_class = bit_class
        self._masks = masks
        self._lazy: dict[int, int] = {}
        self._own: list[int | None] = [None] * len(poset.classes)
        self._pos_cache: dict[str, int] | None = None

    @property
    def entities(self) -> tuple[str, ...]:
        return self.poset.entities

    @property
    def _pos(self) -> dict[str, int]:
        if self._pos_cache is None:
            self._pos_cache = {name: i for i, name in enumerate(self.poset.entities)}
        return self._pos_cache

    def _own_mask(self, c: int) -> int:
        m = self._own[c]
        if m is None:
            m = _pack_mask([self._pos[name] for name in self.poset.classes[c]])
            self._own[c] = m
        return m

    def label_mask(self, c: int) -> int:
        """Label of class c as a bitmask over the poset's entity order."""
        if self._masks is not None:
            return self._masks[c]
        m = self._lazy.get(c)
        if m is None:
            m = 0
            for d in _iter_bits(self._downsets[c]):
                m |= self._own_mask(d)
            self._lazy[c] = m
        return m

    def label_size(self, c: int) -> int:
        """Cardinality of class c's label (no materialization needed)."""
        return sum(len(self.poset.classes[d]) for d in _iter_bits(self._downsets[c]))

    def own_label(self, c: int) -> frozenset[str]:
        """The names of class c's own members."""
        return frozenset(self.poset.classes[c])

    def class_label(self, c: int) -> frozenset[str]:
        ents = self.poset.entities
        return frozenset(ents[i] for i in _iter_bits(self.label_mask(c)))

    def label_of(self, name: str) -> frozenset[str]:
        """The label of an entity (the label of its class)."""
        return self.class_label(self.poset.class_index(name))

    def class_labels(self) -> dict[int, frozenset[str]]:
        """Materialize every class label."""
        return {c: self.class_label(c) for c in range(len(self.poset.classes))}

    def entity_labels(self) -> dict[str, frozenset[str]]:
        """Materialize every entity's label; class members share one set."""
        per_class = self.class_labels()
        return {name: per_class[c] for name, c in self.poset.class_of.items()}

    def includes(self, x: str, y: str) -> bool:
        """True iff the label of x is a subset of the label of y."""
        dx = self._downsets[self.poset.class_index(x)]
        dy = self._downsets[self.poset.class_index(y)]
        return dx & dy == dx

    def __repr__(self) -> str:
        return f"LabelAssignment({len(self.poset.classes)} classes)"


def compute_labels(
    poset: CondensationPoset, *, eager_threshold: int = _EAGER_LABEL_LIMIT
) -> LabelAssignment:
    """Synthesize the label of every class of a poset.

    Classes are processed bottom-up in a topological order of the class
    graph, so each label is the union of its own members' names and the
    already-computed labels of the classes flowing into it. The construction
    performs O(#classes + #class-edges) set unions.
    """
    downsets = poset.down_masks
    masks: list[int] | None = None
    if len(poset.entities) <= eager_threshold:
        pos = {name: i for i, name in enumerate(poset.entities)}
        own = [_pack_mask([pos[m] for m in ms]) for ms in poset.classes]
        masks = [0] * len(poset.classes)
        for c in poset.topo_order:
            m = own[c]
            for p in poset._preds[c]:  # type: ignore[index]
                m |= masks[p]
            masks[c] = m
    return LabelAssignment(poset, downsets, masks)


def can_flow(labels: LabelAssignment, source: str, target: str) -> bool:
    """True iff the label of source is included in the label of target."""
    return labels.includes(source, target)


def _as_name_set(value) -> frozenset[str]:
    if isinstance(value, SetLabel):
        return value.names
    return frozenset(value)


def flow_from_labels(
    labels: LabelAssignment | LabelMap,
    entities: Iterable[str] | None = None,
) -> CondensationPoset:
    """Reconstruct the class poset implied by a set of labels.

    Entities with equal labels share a class; one class flows to another iff
    its label is a subset of the other's. Labels need not have been
    synthesized by :func:`compute_labels` -- any entity-to-name-set mapping
    works, including translated tuple labels.

    Args:
        labels: a LabelAssignment or a mapping from entity name to a set of
            names.
        entities: optionally, the entity universe to cover; defaults to the
            labeled entities.

    Raises:
        MissingLabelError: an entity in the universe has no label.
    """
    if isinstance(labels, LabelAssignment):
        ents = tuple(entities) if entities is not None else labels.poset.entities
        mapping: dict[str, frozenset[str]] = {}
        for name in ents:
            if name not in labels.poset.class_of:
                raise MissingLabelError(f"entity {name!r} has no label")
            mapping[name] = labels.label_of(name)
    else:
        ents = tuple(entities) if entities is not None else tuple(sorted(labels))
        mapping = {}
        for name in ents:
            value = labels.get(name)
            if value is None:
                raise MissingLabelError(f"entity {name!r} has no label")
            mapping[name] = _as_name_set(value)

    name_space = sorted(set().union(*mapping.values())) if mapping else []
    bit_of = {name: i for i, name in enumerate(name_space)}
    masks = {
        name: _pack_mask([bit_of[n] for n in content]) if content else 0
        for name, content in mapping.items()
    }

    by_mask: dict[int, list[str]] = {}
    for name in sorted(mapping):
        by_mask.setdefault(masks[name], []).append(name)
    groups = sorted(by_mask.values(), key=lambda g: g[0])
    class_of = {name: c for c, g in enumerate(groups) for name in g}
    class_masks = [masks[g[0]] for g in groups]

    edges = []
    for a, ma in enumerate(class_masks):
        for b, mb in enumerate(class_masks):
            if a != b and ma & mb == ma:
                edges.append((a, b))
    poset = CondensationPoset(
        tuple(sorted(mapping)),
        tuple(tuple(g) for g in groups),
        class_of,
        tuple(edges),
    )
    poset._ensure_order()  # distinct sets cannot mutually include; asserts that
    return poset


@dataclass(frozen=True)
class IsomorphismReport:
    """Outcome of checking that labels mirror a poset exactly.

    Violations are content, not errors: ``duplicate_labels`` lists class
    pairs whose labels coincide (the label map must be one-to-one), and
    ``order_mismatches`` lists class pairs where the flow order and label
    inclusion disagree in either direction. ``inconsistent_classes`` lists
    classes whose members carry differing labels (only possible with raw
    maps). ``missing_own_names`` is a warning: synthesized labels always
    contain their own class's names, user-supplied ones might not.
    """

    isomorphic: bool
    duplicate_labels: tuple[tuple[int, int], ...]
    order_mismatches: tuple[tuple[int, int], ...]
    inconsistent_classes: tuple[int, ...]
    missing_own_names: tuple[int, ...]


def verify_isomorphism(
    poset: CondensationPoset, labels: LabelAssignment | LabelMap
) -> IsomorphismReport:
    """Check that the label map is injective and order-preserving both ways.

    Args:
        poset: the class structure the labels should mirror.
        labels: a LabelAssignment or raw entity-to-name-set mapping covering
            every entity of the poset.

    Raises:
        MissingLabelError: some entity of the poset has no label.
    """

    def label_for(name: str) -> frozenset[str]:
        if isinstance(labels, LabelAssignment):
            try:
                return labels.label_of(name)
            except UnknownEntityError:
                raise MissingLabelError(f"entity {name!r} has no label") from None
        value = labels.get(name)
        if value is None:
            raise MissingLabelError(f"entity {name!r} has no label")
        return _as_name_set(value)

    class_sets: list[frozenset[str]] = []
    inconsistent: list[int] = []
    missing_own: list[int] = []
    for c, members in enumerate(poset.classes):
        member_sets = {label_for(m) for m in members}
        if len(member_sets) > 1:
            inconsistent.append(c)
        representative = label_for(members[0])
        class_sets.append(representative)
        if not set(members) <= representative:
            missing_own.append(c)

    duplicates = []
    mismatches = []
    k = len(class_sets)
    for i in range(k):
        for j in range(k):
            if i < j and class_sets[i] == class_sets[j]:
                duplicates.append((i, j))
            if i != j and poset.leq(i, j) != (class_sets[i] <= class_sets[j]):
                mismatches.append((i, j))

    return IsomorphismReport(
        isomorphic=not (duplicates or mismatches or inconsistent),
        duplicate_labels=tuple(duplicates),
        order_mismatches=tuple(mismatches),
        inconsistent_classes=tuple(inconsistent),
        missing_own_names=tuple(missing_own),
    )
