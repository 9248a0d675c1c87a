"""Security queries over a condensation poset.

Maximum secrecy classes are the maximal elements of the flow order: their
data flows nowhere else, so their labels are included in no other label.
Maximum integrity classes are the minimal elements: nothing flows into them,
so their labels are exactly their own members' names. A set of entities is in
conflict when no entity exists that all of them can flow to.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from .errors import EntityMismatchError
from .network import CondensationPoset, Network, condense


def max_secrecy_classes(poset: CondensationPoset) -> frozenset[int]:
    """Indices of classes with no outgoing data flows (maximal elements)."""
    return poset.maximal_classes()


def max_integrity_classes(poset: CondensationPoset) -> frozenset[int]:
    """Indices of classes with no incoming data flows (minimal elements)."""
    return poset.minimal_classes()


def in_conflict(poset: CondensationPoset, entities: Iterable[str]) -> bool:
    """True iff no single class can receive data from all given entities.

    Args:
        poset: the flow order to query.
        entities: two or more entity names.

    Raises:
        ValueError: fewer than two entities were given.
        UnknownEntityError: an entity is not declared.

    Entities of one class are never in conflict: the shared class itself is a
    common target, since every entity can flow to itself.
    """
    names = list(entities)
    if len(names) < 2:
        raise ValueError("conflict queries need at least two entities")
    up = poset.up_masks
    common = up[poset.class_index(names[0])]
    for name in names[1:]:
        common &= up[poset.class_index(name)]
        if common == 0:
            return True
    return False


def is_implementation(candidate: Network, poset: CondensationPoset) -> bool:
    """True iff the candidate network realizes exactly the given flow order.

    A poset describes a whole family of channel relations; any network whose
    condensation has the same class partition and the same order belongs to
    it, from the all-channels version down to the transitive reduction.

    Raises:
        EntityMismatchError: the candidate covers a different entity set.
    """
    if set(candidate.entities) != set(poset.entities):
        raise EntityMismatchError(
            "candidate network and poset cover different entity sets"
        )
    return condense(candidate) == poset


@dataclass(frozen=True)
class SecurityReport:
    """Summary of the standard security queries for one poset.

    Classes are reported as their sorted member tuples; ``conflicts`` holds
    unordered entity pairs (stored sorted), never reflexive ones.
    """

    max_secrecy: tuple[tuple[str, ...], ...]
    max_integrity: tuple[tuple[str, ...], ...]
    conflicts: frozenset[tuple[str, str]]


def security_report(poset: CondensationPoset) -> SecurityReport:
    """Run every standard query; pairwise conflicts only (set queries are opt-in)."""
    up = poset.up_masks
    conflict_pairs: set[tuple[str, str]] = set()
    for i, j in combinations(range(len(poset.classes)), 2):
        if up[i] & up[j] == 0:
            for x in poset.classes[i]:
                for y in poset.classes[j]:
                    conflict_pairs.add((x, y) if x < y else (y, x))
    return SecurityReport(
        max_secrecy=tuple(sorted(poset.classes[c] for c in max_secrecy_classes(poset))),
        max_integrity=tuple(
            sorted(poset.classes[c] for c in max_integrity_classes(poset))
        ),
        conflicts=frozenset(conflict_pairs),
    )
