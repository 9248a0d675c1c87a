"""Core network model: channel relations, flow preorders, and their condensation.

A network is a finite set of named entities plus a set of directed channels
(authorizations for data to move). Everything else in the package is derived
from three interchangeable views of such a network:

* the flow relation -- the reflexive-transitive closure of the channels,
* the condensation poset -- equivalence classes of mutually-flowing entities
  ordered by reachability,
* reduced or saturated channel relations reconstructed from either.

All values are immutable after construction and all operations are pure
functions, so concurrent reads are safe.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import (
    CycleError,
    DuplicateEntityError,
    NotAPreorderError,
    UnknownEndpointError,
    UnknownEntityError,
)

# Above this many entities + channels, condensation switches from the
# pure-Python Tarjan to scipy's compiled SCC and vectorized edge mapping.
_NUMPY_THRESHOLD = 10_000


def _iter_bits(mask: int) -> Iterator[int]:
    """Yield the positions of the set bits of a nonnegative int, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _pack_mask(positions: Sequence[int]) -> int:
    """Build a bitmask with the given bit positions set."""
    if not positions:
        return 0
    if len(positions) == 1:
        return 1 << positions[0]
    buf = bytearray(max(positions) // 8 + 1)
    for p in positions:
        buf[p >> 3] |= 1 << (p & 7)
    return int.from_bytes(buf, "little")


@dataclass(frozen=True)
class Network:
    """A finite set of named entities with a directed channel relation.

    ``entities`` keeps the declaration order; ``channels`` is a set, so
    duplicate declarations collapse. Self-channels are permitted (they are
    redundant: the flow relation is reflexive regardless).

    ``build_network`` also records each channel as a pair of entity
    positions; the graph algorithms run on those instead of re-resolving
    names every time.
    """

    entities: tuple[str, ...]
    channels: frozenset[tuple[str, str]]
    _indexed: tuple[tuple[int, int], ...] | None = field(
        default=None, compare=False, repr=False
    )

    def indexed_channels(self) -> tuple[tuple[int, int], ...]:
        """Channels as (source, target) positions into ``entities``."""
        if self._indexed is not None:
            return self._indexed
        pos = {name: i for i, name in enumerate(self.entities)}
        return tuple((pos[a], pos[b]) for a, b in self.channels)

    def __repr__(self) -> str:
        return f"Network({len(self.entities)} entities, {len(self.channels)} channels)"


def build_network(
    entities: Iterable[str], channels: Iterable[tuple[str, str]] = ()
) -> Network:
    """Validate and build a Network.

    Args:
        entities: entity names; order is preserved.
        channels: (source, target) name pairs; duplicates collapse.

    Raises:
        DuplicateEntityError: a name is declared twice.
        UnknownEndpointError: a channel endpoint is not a declared entity.
    """
    ents = tuple(entities)
    pos: dict[str, int] = {}
    for i, name in enumerate(ents):
        if name in pos:
            raise DuplicateEntityError(f"entity {name!r} declared more than once")
        pos[name] = i
    chans = frozenset((a, b) for a, b in channels)
    indexed = []
    for a, b in chans:
        if a not in pos:
            raise UnknownEndpointError(f"channel source {a!r} is not a declared entity")
        if b not in pos:
            raise UnknownEndpointError(f"channel target {b!r} is not a declared entity")
        indexed.append((pos[a], pos[b]))
    return Network(ents, chans, tuple(indexed))


@dataclass(frozen=True)
class FlowRelation:
    """The ``can flow`` preorder over a fixed entity tuple.

    Rows are bitmasks over entity positions: bit j of ``rows[i]`` says data
    can flow from entity i to entity j. Valid instances are reflexive and
    transitive; use :func:`transitive_closure` to obtain one, or
    :meth:`from_pairs` to wrap raw (possibly corrupt) data for checking.
    """

    entities: tuple[str, ...]
    rows: tuple[int, ...]

    @classmethod
    def from_pairs(
        cls, entities: Iterable[str], pairs: Iterable[tuple[str, str]]
    ) -> "FlowRelation":
        """Build a relation from explicit pairs without preorder validation."""
        ents = tuple(entities)
        seen = set()
        for name in ents:
            if name in seen:
                raise DuplicateEntityError(f"entity {name!r} declared more than once")
            seen.add(name)
        pos = {name: i for i, name in enumerate(ents)}
        rows = [0] * len(ents)
        for a, b in pairs:
            if a not in pos:
                raise UnknownEndpointError(f"pair source {a!r} is not a declared entity")
            if b not in pos:
                raise UnknownEndpointError(f"pair target {b!r} is not a declared entity")
            rows[pos[a]] |= 1 << pos[b]
        return cls(ents, tuple(rows))

    def _index(self, name: str) -> int:
        pos = self.__dict__.get("_pos")
        if pos is None:
            pos = {n: i for i, n in enumerate(self.entities)}
            object.__setattr__(self, "_pos", pos)
        try:
            return pos[name]
        except KeyError:
            raise UnknownEntityError(f"unknown entity {name!r}") from None

    def reaches(self, source: str, target: str) -> bool:
        """True iff data can flow from source to target."""
        return bool(self.rows[self._index(source)] >> self._index(target) & 1)

    def pairs(self) -> frozenset[tuple[str, str]]:
        """The relation as a set of name pairs."""
        ents = self.entities
        return frozenset(
            (ents[i], ents[j]) for i, row in enumerate(self.rows) for j in _iter_bits(row)
        )

    def preorder_violation(self) -> str | None:
        """Describe the first reflexivity/transitivity failure, or None."""
        ents = self.entities
        for i, row in enumerate(self.rows):
            if not row >> i & 1:
                return f"not reflexive: ({ents[i]!r}, {ents[i]!r}) missing"
        for i, row in enumerate(self.rows):
            for j in _iter_bits(row):
                extra = self.rows[j] & ~row
                if extra:
                    k = next(_iter_bits(extra))
                    return (
                        f"not transitive: ({ents[i]!r}, {ents[j]!r}) and "
                        f"({ents[j]!r}, {ents[k]!r}) hold but ({ents[i]!r}, {ents[k]!r}) does not"
                    )
        return None

    def is_preorder(self) -> bool:
        return self.preorder_violation() is None

    def __repr__(self) -> str:
        size = sum(row.bit_count() for row in self.rows)
        return f"FlowRelation({len(self.entities)} entities, {size} pairs)"


class CondensationPoset:
    """Equivalence classes of mutually-flowing entities, partially ordered.

    ``classes`` is canonical: members sorted by name, classes ordered by their
    smallest member. ``leq(i, j)`` answers whether class i's data may flow to
    class j. Reachability masks are computed lazily and cached; everything is
    immutable from the caller's perspective.
    """

    __slots__ = (
        "entities",
        "classes",
        "class_of",
        "_edges",
        "_topo",
        "_preds",
        "_succs",
        "_up",
        "_down",
        "_covers",
    )

    def __init__(
        self,
        entities: tuple[str, ...],
        classes: tuple[tuple[str, ...], ...],
        class_of: dict[str, int],
        edges: tuple[tuple[int, int], ...],
    ):
        # Trusted constructor: classes canonical, edges strict (i != j) with
        # transitive closure equal to the strict order. Public paths go
        # through condense() or poset_from_classes(), which guarantee this.
        self.entities = entities
        self.classes = classes
        self.class_of = class_of
        self._edges = edges
        self._topo: tuple[int, ...] | None = None
        self._preds: tuple[tuple[int, ...], ...] | None = None
        self._succs: tuple[tuple[int, ...], ...] | None = None
        self._up: tuple[int, ...] | None = None
        self._down: tuple[int, ...] | None = None
        self._covers: tuple[tuple[int, int], ...] | None = None

    # -- structure ---------------------------------------------------------

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    @property
    def strict_edges(self) -> tuple[tuple[int, int], ...]:
        """Generating strict relation (closure equals the strict order)."""
        return self._edges

    def _ensure_order(self) -> None:
        """Topologically sort the class graph; reject cycles."""
        if self._topo is not None:
            return
        k = len(self.classes)
        preds: list[list[int]] = [[] for _ in range(k)]
        succs: list[list[int]] = [[] for _ in range(k)]
        indeg = [0] * k
        for a, b in self._edges:
            succs[a].append(b)
            preds[b].append(a)
            indeg[b] += 1
        topo = [i for i in range(k) if indeg[i] == 0]
        head = 0
        while head < len(topo):
            v = topo[head]
            head += 1
            for w in succs[v]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    topo.append(w)
        if len(topo) != k:
            raise CycleError(
                "declared relation is cyclic between distinct classes; "
                "mutually-flowing entities must share one class"
            )
        self._preds = tuple(tuple(p) for p in preds)
        self._succs = tuple(tuple(s) for s in succs)
        self._topo = tuple(topo)

    @property
    def topo_order(self) -> tuple[int, ...]:
        """Class indices ordered sources (minimal) first."""
        self._ensure_order()
        return self._topo  # type: ignore[return-value]

    @property
    def up_masks(self) -> tuple[int, ...]:
        """Per class, the bitmask of classes it can flow to (itself included)."""
        if self._up is None:
            self._ensure_order()
            up = [0] * len(self.classes)
            for c in reversed(self._topo):  # type: ignore[arg-type]
                m = 1 << c
                for s in self._succs[c]:  # type: ignore[index]
                    m |= up[s]
                up[c] = m
            self._up = tuple(up)
        return self._up

    @property
    def down_masks(self) -> tuple[int, ...]:
        """Per class, the bitmask of classes that can flow to it (itself included)."""
        if self._down is None:
            self._ensure_order()
            down = [0] * len(self.classes)
            for c in self._topo:  # type: ignore[union-attr]
                m = 1 << c
                for p in self._preds[c]:  # type: ignore[index]
                    m |= down[p]
                down[c] = m
            self._down = tuple(down)
        return self._down

    # -- queries -----------------------------------------------------------

    def class_index(self, name: str) -> int:
        try:
            return self.class_of[name]
        except KeyError:
            raise UnknownEntityError(f"unknown entity {name!r}") from None

    def leq(self, i: int, j: int) -> bool:
        """True iff class i's data may flow to class j (the partial order)."""
        return bool(self.up_masks[i] >> j & 1)

    def leq_pairs(self) -> frozenset[tuple[int, int]]:
        """The full (reflexive) order as a set of class index pairs."""
        return frozenset(
            (i, j) for i, m in enumerate(self.up_masks) for j in _iter_bits(m)
        )

    def covers(self) -> tuple[tuple[int, int], ...]:
        """The unique transitive reduction of the class order (Hasse edges)."""
        if self._covers is None:
            up = self.up_masks
            out = []
            for i in range(len(self.classes)):
                strict = up[i] & ~(1 << i)
                implied = 0
                for j in _iter_bits(strict):
                    implied |= up[j] & ~(1 << j)
                out.extend((i, j) for j in _iter_bits(strict & ~implied))
            self._covers = tuple(sorted(out))
        return self._covers

    def minimal_classes(self) -> frozenset[int]:
        """Classes with no incoming strict flow."""
        has_in = {b for _, b in self._edges}
        return frozenset(i for i in range(len(self.classes)) if i not in has_in)

    def maximal_classes(self) -> frozenset[int]:
        """Classes with no outgoing strict flow."""
        has_out = {a for a, _ in self._edges}
        return frozenset(i for i in range(len(self.classes)) if i not in has_out)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CondensationPoset):
            return NotImplemented
        return self.classes == other.classes and self.up_masks == other.up_masks

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return (
            f"CondensationPoset({len(self.classes)} classes over "
            f"{len(self.entities)} entities)"
        )


# -- strongly connected components ------------------------------------------


def _scc_python(n: int, adjacency: list[list[int]]) -> list[int]:
    """Iterative Tarjan; returns a class id per vertex (ids arbitrary)."""
    index = [-1] * n
    low = [0] * n
    on_stack = bytearray(n)
    stack: list[int] = []
    comp = [0] * n
    counter = 0
    n_comps = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, i = work.pop()
            if i == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = 1
            succ = adjacency[v]
            lv = low[v]
            recurse = False
            while i < len(succ):
                w = succ[i]
                i += 1
                if index[w] == -1:
                    low[v] = lv
                    work.append((v, i))
                    work.append((w, 0))
                    recurse = True
                    break
                if on_stack[w] and index[w] < lv:
                    lv = index[w]
            if recurse:
                continue
            low[v] = lv
            if lv == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = 0
                    comp[w] = n_comps
                    if w == v:
                        break
                n_comps += 1
            if work:
                pv = work[-1][0]
                if lv < low[pv]:
                    low[pv] = lv
    return comp


def _condense_small(
    net: Network,
) -> tuple[list[int], tuple[tuple[int, int], ...], list[int]]:
    adjacency: list[list[int]] = [[] for _ in net.entities]
    edge_idx = net.indexed_channels()
    for a, b in edge_idx:
        adjacency[a].append(b)
    comp = _scc_python(len(net.entities), adjacency)
    cedges = tuple({(comp[a], comp[b]) for a, b in edge_idx if comp[a] != comp[b]})
    order = sorted(range(len(net.entities)), key=net.entities.__getitem__)
    return comp, cedges, order


def _condense_numpy(
    net: Network,
) -> tuple[list[int], tuple[tuple[int, int], ...], list[int]]:
    import numpy as np
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import connected_components

    n = len(net.entities)
    edge_idx = net.indexed_channels()
    m = len(edge_idx)
    src = np.fromiter((a for a, _ in edge_idx), dtype=np.int64, count=m)
    dst = np.fromiter((b for _, b in edge_idx), dtype=np.int64, count=m)
    matrix = csr_matrix((np.ones(m, dtype=np.int8), (src, dst)), shape=(n, n))
    k, comp = connected_components(matrix, directed=True, connection="strong")
    ca = comp[src].astype(np.int64)
    cb = comp[dst].astype(np.int64)
    off_diag = ca != cb
    packed = np.unique(ca[off_diag] * k + cb[off_diag])
    cedges = tuple(zip((packed // k).tolist(), (packed % k).tolist()))
    by_name = np.argsort(np.array(net.entities))
    return comp.tolist(), cedges, by_name.tolist()


def condense(net: Network | FlowRelation) -> CondensationPoset:
    """Partition a network into equivalence classes and order them by flow.

    Two entities share a class exactly when each can flow to the other
    (a strongly connected component of the channel digraph). The classes are
    ordered by reachability, which is a partial order. Runs in time linear in
    entities + channels.

    Accepts a FlowRelation as well: its pairs are treated as channels (the
    condensation of a closure and of its generating channels coincide).
    """
    if isinstance(net, FlowRelation):
        net = Network(net.entities, net.pairs())
    if len(net.entities) + len(net.channels) > _NUMPY_THRESHOLD and net.channels:
        comp, cedges, order = _condense_numpy(net)
    else:
        comp, cedges, order = _condense_small(net)

    # Canonical renumbering: classes ordered by smallest member name,
    # members listed in name order.
    renumber: dict[int, int] = {}
    members: list[list[str]] = []
    class_of: dict[str, int] = {}
    for v in order:
        old = comp[v]
        new = renumber.get(old)
        if new is None:
            new = len(members)
            renumber[old] = new
            members.append([])
        members[new].append(net.entities[v])
        class_of[net.entities[v]] = new
    classes = tuple(tuple(ms) for ms in members)
    edges = tuple(sorted((renumber[a], renumber[b]) for a, b in cedges))
    return CondensationPoset(net.entities, classes, class_of, edges)


def poset_from_classes(
    classes: Iterable[Iterable[str]],
    relations: Iterable[tuple[str, str]] = (),
) -> CondensationPoset:
    """Build a condensation poset directly from a partition and a relation.

    Args:
        classes: disjoint nonempty groups of entity names.
        relations: (x, y) pairs meaning x's class flows to y's class; the
            order is the reflexive-transitive closure of these pairs.

    Raises:
        DuplicateEntityError: a name occurs in two classes (or twice in one).
        UnknownEntityError: a relation names an undeclared entity.
        CycleError: the declared relation makes two distinct classes
            mutually reachable (they should have been one class).
    """
    groups = [sorted(g) for g in classes]
    if any(not g for g in groups):
        raise ValueError("classes must be nonempty")
    groups.sort(key=lambda g: g[0])
    class_of: dict[str, int] = {}
    for i, g in enumerate(groups):
        for name in g:
            if name in class_of:
                raise DuplicateEntityError(f"entity {name!r} appears in two classes")
            class_of[name] = i
    entities = tuple(sorted(class_of))
    edge_set = set()
    for x, y in relations:
        if x not in class_of:
            raise UnknownEntityError(f"unknown entity {x!r}")
        if y not in class_of:
            raise UnknownEntityError(f"unknown entity {y!r}")
        a, b = class_of[x], class_of[y]
        if a != b:
            edge_set.add((a, b))
    poset = CondensationPoset(
        entities, tuple(tuple(g) for g in groups), class_of, tuple(sorted(edge_set))
    )
    poset._ensure_order()  # validate acyclicity eagerly
    return poset


# -- conversions -------------------------------------------------------------


def transitive_closure(net: Network) -> FlowRelation:
    """Compute the flow relation: the reflexive-transitive closure of channels.

    Entities of the same equivalence class share one row object, so memory is
    proportional to classes rather than entities squared.
    """
    poset = condense(net)
    pos = {name: i for i, name in enumerate(net.entities)}
    own = [_pack_mask([pos[m] for m in ms]) for ms in poset.classes]
    poset._ensure_order()
    reach = [0] * len(poset.classes)
    for c in reversed(poset.topo_order):
        m = own[c]
        for s in poset._succs[c]:  # type: ignore[index]
            m |= reach[s]
        reach[c] = m
    rows = tuple(reach[poset.class_of[name]] for name in net.entities)
    return FlowRelation(net.entities, rows)


def flow_between(
    relation: FlowRelation | CondensationPoset, source: str, target: str
) -> bool:
    """True iff data can flow from source to target, from either view."""
    if isinstance(relation, FlowRelation):
        return relation.reaches(source, target)
    return relation.leq(relation.class_index(source), relation.class_index(target))


def channels_from_flow(flow: FlowRelation) -> Network:
    """Materialize every possible channel of a flow relation.

    The result's channel set equals the flow relation itself (the saturated
    implementation, useful when channels have no cost).

    Raises:
        NotAPreorderError: the relation is not reflexive or not transitive,
            which signals corrupted input rather than a computed closure.
    """
    violation = flow.preorder_violation()
    if violation is not None:
        raise NotAPreorderError(violation)
    return build_network(flow.entities, flow.pairs())


def transitive_reduction(poset: CondensationPoset) -> Network:
    """Build a minimal network whose condensation is the given poset.

    Each multi-member class becomes one directed cycle over its members in
    name order; each cover edge of the class order becomes a single channel
    between the smallest-named members. No network with fewer channels
    condenses to the same poset.
    """
    channels: list[tuple[str, str]] = []
    for members in poset.classes:
        if len(members) > 1:
            channels.extend(zip(members, members[1:]))
            channels.append((members[-1], members[0]))
    for i, j in poset.covers():
        channels.append((poset.classes[i][0], poset.classes[j][0]))
    return build_network(poset.entities, channels)
