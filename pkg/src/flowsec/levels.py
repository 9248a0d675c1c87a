"""Tuple labels over a poset of security levels, and their set translation.

A tuple label pairs a security level with a set of categories and is compared
componentwise: one label is below another iff its level is below and its
categories are a subset. Any such label can be rewritten as a plain set of
names -- one fresh "level category" per level at or below the label's level,
plus the label's own categories -- and the rewrite preserves the order, so
set inclusion alone can express tuple-label policies.

Level categories are namespaced with the reserved ``lev:`` prefix so they can
never collide with user categories, even one literally named like a level.
Display helpers drop the prefix when it is unambiguous, which matches the
readable convention used in security texts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import CycleError, UnknownCategoryError, UnknownLevelError

LEVEL_PREFIX = "lev:"


class LevelPoset:
    """A finite set of security levels with a (not necessarily total) order.

    Build with :func:`level_poset` from cover pairs like
    ``("CONFIDENTIAL", "SECRET")``; the reflexive-transitive closure is taken
    and cycles are rejected, so the order is always a genuine partial order.
    """

    __slots__ = ("levels", "_below")

    def __init__(self, levels: tuple[str, ...], below: dict[str, frozenset[str]]):
        self.levels = levels
        self._below = below  # level -> every level at or below it

    def __contains__(self, level: str) -> bool:
        return level in self._below

    def _check(self, level: str) -> None:
        if level not in self._below:
            raise UnknownLevelError(f"unknown security level {level!r}")

    def leq(self, a: str, b: str) -> bool:
        """True iff level a is at or below level b."""
        self._check(a)
        self._check(b)
        return a in self._below[b]

    def down_set(self, level: str) -> frozenset[str]:
        """Every level at or below the given one (itself included)."""
        self._check(level)
        return self._below[level]

    def covers(self) -> tuple[tuple[str, str], ...]:
        """The unique minimal (lower, upper) pairs generating the order."""
        out = []
        for upper in self.levels:
            for lower in self._below[upper] - {upper}:
                between = any(
                    z != lower and z != upper and lower in self._below[z]
                    for z in self._below[upper]
                )
                if not between:
                    out.append((lower, upper))
        return tuple(sorted(out))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LevelPoset):
            return NotImplemented
        return self.levels == other.levels and self._below == other._below

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"LevelPoset({', '.join(self.levels)})"


def level_poset(
    order: Iterable[tuple[str, str]], levels: Iterable[str] = ()
) -> LevelPoset:
    """Build a level poset from covers (lower, upper) plus optional isolated levels.

    Raises:
        CycleError: the declared order relates two levels in both directions.
    """
    names: set[str] = set(levels)
    covers = [(a, b) for a, b in order]
    for a, b in covers:
        names.add(a)
        names.add(b)
    below: dict[str, set[str]] = {name: {name} for name in sorted(names)}
    above: dict[str, set[str]] = {name: {name} for name in below}
    for a, b in covers:
        if a == b or b in below[a]:
            raise CycleError(f"levels {a!r} and {b!r} would order each other")
        # connect everything at-or-below a with everything at-or-above b
        for hi in above[b]:
            below[hi] |= below[a]
        for lo in below[a]:
            above[lo] |= above[b]
    return LevelPoset(
        tuple(sorted(names)), {name: frozenset(v) for name, v in below.items()}
    )


@dataclass(frozen=True)
class TupleLabel:
    """A composite security label: one level plus a set of categories."""

    level: str
    categories: frozenset[str] = field(default_factory=frozenset)

    def __repr__(self) -> str:
        cats = ",".join(sorted(self.categories))
        return f"<{self.level};{{{cats}}}>"


def tuple_label(level: str, categories: Iterable[str] = ()) -> TupleLabel:
    return TupleLabel(level, frozenset(categories))


@dataclass(frozen=True)
class SetLabel:
    """A plain set-of-names label, as produced by translating a tuple label.

    ``names`` is canonical: level categories carry the ``lev:`` prefix.
    ``display`` drops the prefixes when that loses no information.
    """

    names: frozenset[str]

    def display(self) -> frozenset[str]:
        bare = {n[len(LEVEL_PREFIX):] for n in self.names if n.startswith(LEVEL_PREFIX)}
        plain = {n for n in self.names if not n.startswith(LEVEL_PREFIX)}
        if bare & plain:
            return self.names
        return frozenset(bare | plain)

    def __repr__(self) -> str:
        return f"SetLabel({{{', '.join(sorted(self.names))}}})"


def _check_categories(
    label: TupleLabel, universe: Iterable[str] | None
) -> None:
    if universe is None:
        return
    unknown = label.categories - frozenset(universe)
    if unknown:
        raise UnknownCategoryError(
            f"unknown categories: {', '.join(sorted(unknown))}"
        )


def tuple_leq(
    a: TupleLabel,
    b: TupleLabel,
    levels: LevelPoset,
    categories: Iterable[str] | None = None,
) -> bool:
    """Componentwise comparison: level at-or-below and categories included.

    Args:
        a, b: the labels to compare.
        levels: the poset the labels' levels belong to.
        categories: optional category universe; when given, labels using
            other categories are rejected.

    Raises:
        UnknownLevelError: a label's level is not in the poset.
        UnknownCategoryError: a label uses a category outside the universe.
    """
    _check_categories(a, categories)
    _check_categories(b, categories)
    return levels.leq(a.level, b.level) and a.categories <= b.categories


def tuple_to_set(
    label: TupleLabel,
    levels: LevelPoset,
    categories: Iterable[str] | None = None,
) -> SetLabel:
    """Translate a tuple label into an order-equivalent set label.

    The result contains one level category for every level at or below the
    label's level, together with the label's own categories. Comparing two
    translations by set inclusion gives exactly the tuple-label order.
    """
    _check_categories(label, categories)
    level_cats = {LEVEL_PREFIX + lv for lv in levels.down_set(label.level)}
    return SetLabel(frozenset(level_cats) | label.categories)


def batch_translate(
    labels: Mapping[str, TupleLabel],
    levels: LevelPoset,
    categories: Iterable[str] | None = None,
) -> dict[str, SetLabel]:
    """Translate an entity-to-tuple-label map into set labels, pointwise.

    The result can be handed straight to :func:`flowsec.flow_from_labels`.
    """
    universe = None if categories is None else frozenset(categories)
    return {
        name: tuple_to_set(label, levels, universe)
        for name, label in labels.items()
    }
