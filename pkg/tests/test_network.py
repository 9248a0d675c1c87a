"""Core graph operations against hand-derived values and independent oracles."""

import random

import pytest

from flowsec import (
    CycleError,
    DuplicateEntityError,
    FlowRelation,
    NotAPreorderError,
    UnknownEndpointError,
    UnknownEntityError,
    build_network,
    channels_from_flow,
    condense,
    flow_between,
    poset_from_classes,
    transitive_closure,
    transitive_reduction,
)
import flowsec.network

from oracles import (
    closure_oracle,
    dag_reduction_edge_count,
    minimum_edges_oracle,
    partition_oracle,
    poset_descriptor,
    random_network_data,
    random_poset,
)

DEMO_ENTITIES = list("ABCDEFGH")
DEMO_CHANNELS = [
    ("B", "F"), ("F", "H"), ("H", "B"),
    ("A", "G"), ("G", "A"),
    ("B", "A"), ("C", "A"),
    ("G", "D"), ("G", "E"),
]


def demo_network():
    return build_network(DEMO_ENTITIES, DEMO_CHANNELS)


# -- build_network ------------------------------------------------------------


def test_smallest_network():
    net = build_network(["a"])
    assert net.entities == ("a",)
    assert net.channels == frozenset()


def test_duplicate_channels_collapse():
    net = build_network(["a", "b"], [("a", "b"), ("a", "b")])
    assert len(net.channels) == 1


def test_duplicate_entity_rejected():
    with pytest.raises(DuplicateEntityError):
        build_network(["a", "a"])


def test_unknown_endpoint_rejected():
    with pytest.raises(UnknownEndpointError):
        build_network(["a"], [("a", "b")])


def test_entity_order_preserved():
    assert build_network(["z", "a", "m"]).entities == ("z", "a", "m")


# -- transitive_closure -------------------------------------------------------


def test_closure_reflexive_only():
    flow = transitive_closure(build_network(["a", "b"]))
    assert flow.pairs() == frozenset({("a", "a"), ("b", "b")})


def test_closure_single_transitive_step():
    net = build_network(["a", "b", "c"], [("a", "b"), ("b", "c")])
    flow = transitive_closure(net)
    assert flow.reaches("a", "c")
    assert not flow.reaches("c", "a")


def test_closure_matches_fixpoint_oracle():
    rng = random.Random(11)
    for _ in range(300):
        entities, pairs = random_network_data(rng)
        flow = transitive_closure(build_network(entities, pairs))
        assert flow.pairs() == closure_oracle(entities, pairs)


def test_closure_idempotent_through_channels():
    # closing the saturated network of a flow gives the flow back
    rng = random.Random(12)
    for _ in range(100):
        entities, pairs = random_network_data(rng)
        flow = transitive_closure(build_network(entities, pairs))
        again = transitive_closure(channels_from_flow(flow))
        assert again == flow


# -- condense -----------------------------------------------------------------


def test_condense_hand_enumerated_example():
    net = build_network(["a", "b", "c"], [("a", "b"), ("b", "a"), ("b", "c")])
    poset = condense(net)
    assert poset.classes == (("a", "b"), ("c",))
    assert poset.leq(0, 1)
    assert not poset.leq(1, 0)


def test_condense_acyclic_matches_reaches():
    net = build_network(["a", "b", "c", "d"], [("a", "b"), ("b", "c"), ("a", "d")])
    poset = condense(net)
    assert all(len(members) == 1 for members in poset.classes)
    flow = transitive_closure(net)
    for x in net.entities:
        for y in net.entities:
            assert flow.reaches(x, y) == poset.leq(
                poset.class_index(x), poset.class_index(y)
            )


def test_condense_demo_nontrivial_classes():
    poset = condense(demo_network())
    nontrivial = {members for members in poset.classes if len(members) > 1}
    assert nontrivial == {("B", "F", "H"), ("A", "G")}
    assert set(poset.classes) == {
        ("A", "G"), ("B", "F", "H"), ("C",), ("D",), ("E",),
    }


def test_condense_order_axioms():
    rng = random.Random(13)
    for _ in range(100):
        entities, pairs = random_network_data(rng)
        poset = condense(build_network(entities, pairs))
        leq = poset.leq_pairs()
        k = poset.n_classes
        for i in range(k):
            assert (i, i) in leq
        for i, j in leq:
            if i != j:
                assert (j, i) not in leq
            for j2, l in leq:
                if j2 == j:
                    assert (i, l) in leq


def test_condense_partition_matches_mutual_reachability():
    rng = random.Random(14)
    for _ in range(100):
        entities, pairs = random_network_data(rng)
        poset = condense(build_network(entities, pairs))
        closure = closure_oracle(entities, pairs)
        for x in entities:
            for y in entities:
                together = poset.class_of[x] == poset.class_of[y]
                mutual = (x, y) in closure and (y, x) in closure
                assert together == mutual


def test_condense_numpy_path_agrees(monkeypatch):
    rng = random.Random(15)
    cases = [random_network_data(rng) for _ in range(40)]
    defaults = [condense(build_network(e, p)) for e, p in cases]
    monkeypatch.setattr(flowsec.network, "_NUMPY_THRESHOLD", 0)
    for (entities, pairs), expected in zip(cases, defaults):
        assert condense(build_network(entities, pairs)) == expected


def test_condense_self_loops_are_trivial():
    poset = condense(build_network(["a", "b"], [("a", "a")]))
    assert poset.classes == (("a",), ("b",))


def test_determinism_under_channel_order():
    rng = random.Random(16)
    for _ in range(30):
        entities, pairs = random_network_data(rng)
        shuffled = pairs[:]
        rng.shuffle(shuffled)
        a = condense(build_network(entities, pairs))
        b = condense(build_network(entities, shuffled))
        assert a == b and a.classes == b.classes and a.strict_edges == b.strict_edges


# -- flow_between -------------------------------------------------------------


def test_flow_between_reflexive():
    net = build_network(["x"])
    assert flow_between(transitive_closure(net), "x", "x")
    assert flow_between(condense(net), "x", "x")


def test_flow_between_chain():
    net = build_network(["a", "b", "c"], [("a", "b"), ("b", "c")])
    poset = condense(net)
    assert flow_between(poset, "a", "c")
    assert not flow_between(poset, "c", "a")


def test_flow_between_views_agree():
    rng = random.Random(17)
    for _ in range(100):
        entities, pairs = random_network_data(rng)
        net = build_network(entities, pairs)
        flow = transitive_closure(net)
        poset = condense(net)
        for x in entities:
            for y in entities:
                assert flow_between(flow, x, y) == flow_between(poset, x, y)


def test_flow_between_unknown_entity():
    poset = condense(build_network(["a"]))
    with pytest.raises(UnknownEntityError):
        flow_between(poset, "a", "zz")


# -- channels_from_flow -------------------------------------------------------


def test_channels_of_reflexive_flow():
    flow = transitive_closure(build_network(["a", "b"]))
    assert channels_from_flow(flow).channels == frozenset(
        {("a", "a"), ("b", "b")}
    )


def test_channels_of_two_cycle():
    flow = transitive_closure(build_network(["a", "b"], [("a", "b"), ("b", "a")]))
    channels = channels_from_flow(flow).channels
    assert ("a", "b") in channels and ("b", "a") in channels


def test_non_reflexive_input_rejected():
    broken = FlowRelation.from_pairs(["a", "b"], [("a", "b")])
    with pytest.raises(NotAPreorderError, match="reflexive"):
        channels_from_flow(broken)


def test_non_transitive_input_rejected():
    broken = FlowRelation.from_pairs(
        ["a", "b", "c"],
        [("a", "a"), ("b", "b"), ("c", "c"), ("a", "b"), ("b", "c")],
    )
    with pytest.raises(NotAPreorderError, match="transitive"):
        channels_from_flow(broken)


# -- transitive_reduction -----------------------------------------------------


def test_reduction_drops_chain_shortcut():
    poset = poset_from_classes(
        [["a"], ["b"], ["c"]], [("a", "b"), ("b", "c"), ("a", "c")]
    )
    reduced = transitive_reduction(poset)
    assert reduced.channels == frozenset({("a", "b"), ("b", "c")})


def test_reduction_lone_class_is_cycle():
    poset = poset_from_classes([["x", "y"]])
    assert transitive_reduction(poset).channels == frozenset(
        {("x", "y"), ("y", "x")}
    )


def test_reduction_round_trip():
    rng = random.Random(18)
    for _ in range(150):
        poset = random_poset(rng)
        assert condense(transitive_reduction(poset)) == poset


def test_reduction_edge_count_is_minimum_for_singleton_dags():
    # brute-force subset search over candidate strict pairs, smallest first
    rng = random.Random(19)
    for _ in range(12):
        poset = random_poset(rng, max_classes=6, max_class_size=1)
        entities = list(poset.entities)
        reduced = transitive_reduction(poset)
        target = poset_descriptor(poset)
        candidates = [
            (entities[i], entities[j])
            for i in range(len(entities))
            for j in range(len(entities))
            if i != j and poset.leq(poset.class_index(entities[i]),
                                    poset.class_index(entities[j]))
        ]
        minimum = minimum_edges_oracle(
            entities, target, candidates, len(reduced.channels)
        )
        assert len(reduced.channels) == minimum
        # the unique DAG reduction formula agrees
        order = {
            (x, y)
            for x in entities
            for y in entities
            if poset.leq(poset.class_index(x), poset.class_index(y))
        }
        assert len(reduced.channels) == dag_reduction_edge_count(order)


def test_reduction_edge_count_is_minimum_for_small_mixed_posets():
    # all directed pairs are candidates here, so keep instances tiny
    cases = [
        poset_from_classes([["a", "b"], ["c"]], [("a", "c")]),
        poset_from_classes([["a", "b", "c"]]),
        poset_from_classes([["a", "b"], ["c", "d"]], [("a", "c")]),
        poset_from_classes([["a"], ["b", "c"], ["d"]], [("a", "b"), ("b", "d")]),
        poset_from_classes([["a", "b"], ["c"], ["d"]], [("c", "a"), ("a", "d")]),
    ]
    for poset in cases:
        entities = list(poset.entities)
        reduced = transitive_reduction(poset)
        candidates = [(x, y) for x in entities for y in entities if x != y]
        minimum = minimum_edges_oracle(
            entities, poset_descriptor(poset), candidates, len(reduced.channels)
        )
        assert len(reduced.channels) == minimum


# -- poset_from_classes -------------------------------------------------------


def test_poset_from_classes_canonical_order():
    poset = poset_from_classes([["z", "m"], ["a"]], [("a", "z")])
    assert poset.classes == (("a",), ("m", "z"))
    assert poset.leq(0, 1)


def test_poset_from_classes_duplicate_member():
    with pytest.raises(DuplicateEntityError):
        poset_from_classes([["a"], ["a", "b"]])


def test_poset_from_classes_unknown_relation_entity():
    with pytest.raises(UnknownEntityError):
        poset_from_classes([["a"]], [("a", "b")])


def test_poset_from_classes_cycle_rejected():
    with pytest.raises(CycleError):
        poset_from_classes([["a"], ["b"]], [("a", "b"), ("b", "a")])
