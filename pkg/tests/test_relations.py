import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from evosum.errors import RelationSpecError
from evosum.grid import build_grid
from evosum.relations import (RelationConfig, RelationInstance, brute_force_relations,
                              extract_relations, load_relation_specs)
from evosum.schema import UNFILLED, Message
from helpers import random_messages


def perf(value=50, time=1, source="A", entity="Nalitzis", in_what="general",
         time_span="whole_match", doc=None):
    return Message.create("performance", {"entity": entity, "in_what": in_what,
                                          "time_span": time_span, "value": value},
                          time, source, doc or f"{source}{time}-{value}", (0,))


def names(rels):
    return sorted((r.axis, r.name) for r in rels)


def run(pack, msgs, config=RelationConfig(), partial=False):
    g = build_grid(msgs, include_partial=partial)
    return extract_relations(g, pack.relations, config, pack.ontology)


def test_bundled_inventory(pack):
    specs = pack.relations
    assert len(specs) == 12
    assert sum(s.axis == "synchronic" for s in specs) == 6
    assert sum(s.axis == "diachronic" for s in specs) == 6


def test_axis_invariants_enforced():
    bad = [{"name": "X", "axis": "synchronic", "message_types": "*", "temporal_distance": 1}]
    with pytest.raises(RelationSpecError):
        load_relation_specs(json.dumps(bad))
    bad = [{"name": "X", "axis": "diachronic", "message_types": "*", "source_condition": "different"}]
    with pytest.raises(RelationSpecError):
        load_relation_specs(json.dumps(bad))


def test_spec_slot_checked_against_registry(registry):
    bad = [{"name": "X", "axis": "synchronic", "message_types": ["performance"],
            "predicates": ["equal(colour)"]}]
    with pytest.raises(RelationSpecError):
        load_relation_specs(json.dumps(bad), registry)
    bad = [{"name": "X", "axis": "synchronic", "message_types": ["performance"],
            "predicates": ["less(entity)"]}]
    with pytest.raises(RelationSpecError):
        load_relation_specs(json.dumps(bad), registry)


def test_agreement(pack):
    rels = run(pack, [perf(source="A"), perf(source="B")])
    assert names(rels) == [("synchronic", "Agreement")]
    assert (rels[0].from_msg.source, rels[0].to_msg.source) == ("A", "B")


def test_positive_graduation(pack):
    rels = run(pack, [perf(50, time=1), perf(100, time=2)])
    assert names(rels) == [("diachronic", "Positive Graduation")]
    assert rels[0].from_msg.time == 1


def test_stability_and_no_relation(pack):
    assert names(run(pack, [perf(time=1), perf(time=2)])) == [("diachronic", "Stability")]
    assert run(pack, [perf(time=1, source="A"), perf(time=3, source="B")]) == []


def test_near_agreement_and_disagreement(pack):
    # a close but unequal pair is both near agreement and disagreement
    assert names(run(pack, [perf(50, source="A"), perf(60, source="B")])) == \
        [("synchronic", "Disagreement"), ("synchronic", "Near Agreement")]
    assert names(run(pack, [perf(25, source="A"), perf(90, source="B")])) == \
        [("synchronic", "Disagreement")]


def test_generalization_both_axes(pack):
    sync = run(pack, [perf(in_what="Action_Area", source="A"), perf(in_what="attack", source="B")])
    assert ("synchronic", "Generalization") in names(sync)
    prec = run(pack, [perf(in_what="attack", source="A"), perf(in_what="Action_Area", source="B")])
    assert ("synchronic", "Preciseness") in names(prec)
    dia = run(pack, [perf(time=1, time_span="Duration"), perf(time=2, time_span="first_half")])
    assert ("diachronic", "Generalization") in names(dia)


def test_elaboration_needs_partial(pack):
    full = perf(source="B")
    part = Message.create("performance", {"entity": "Nalitzis", "in_what": "general",
                                          "time_span": UNFILLED, "value": 50}, 1, "A", "p", (0,))
    rels = run(pack, [part, full], partial=True)
    assert ("synchronic", "Elaboration") in names(rels)
    assert ("synchronic", "Agreement") not in names(rels)


def test_repetition_and_continuation(pack, registry, onto):
    schema = registry["injured"]
    vals = {a.name: ("Nalitzis" if a.name == "entity" else
                     sorted(onto.instances_under(a.value_type[0]))[0]
                     if a.value_type[0] not in ("Degree", "TimeSpan") else 50 if a.value_type[0] == "Degree" else "whole_match")
            for a in schema.args}
    a = Message.create("injured", vals, 1, "A", "x", (0,))
    b = Message.create("injured", vals, 2, "A", "y", (0,))
    got = names(run(pack, [a, b]))
    assert ("diachronic", "Repetition") in got and ("diachronic", "Continuation") in got


def test_empty_and_single(pack, onto):
    assert brute_force_relations([], pack.relations, ontology=onto) == []
    assert brute_force_relations([perf()], pack.relations, ontology=onto) == []


def test_max_distance_config(pack):
    msgs = [perf(50, time=1), perf(100, time=3)]
    assert run(pack, msgs) == []
    assert names(run(pack, msgs, RelationConfig(max_diachronic_distance=2))) == \
        [("diachronic", "Positive Graduation")]


def test_window_config(pack):
    msgs = [perf(source="A", time=1), perf(source="B", time=2)]
    assert run(pack, msgs) == []
    assert names(run(pack, msgs, RelationConfig(window=1))) == [("synchronic", "Agreement")]


def test_relation_dump_round_trip(pack):
    rels = run(pack, [perf(source="A"), perf(source="B")])
    again = [RelationInstance.from_dict(json.loads(json.dumps(r.to_dict()))) for r in rels]
    assert [r.key() for r in again] == [r.key() for r in rels]


def test_parallel_matches_serial(pack, noiseless):
    g = build_grid(noiseless.gold_messages, noiseless.corpus.sources)
    a = extract_relations(g, pack.relations, RelationConfig(), pack.ontology, workers=1)
    b = extract_relations(g, pack.relations, RelationConfig(), pack.ontology, workers=4)
    assert [r.to_dict() for r in a] == [r.to_dict() for r in b]


_cfg = st.builds(RelationConfig, window=st.integers(0, 3),
                 max_diachronic_distance=st.integers(1, 3), delta=st.sampled_from([0, 10, 25]))


@settings(max_examples=500, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(0, 60), _cfg, st.booleans())
def test_oracle_equivalence(seed, n, cfg, partial):
    from evosum import football_pack
    pack = football_pack()
    msgs = random_messages(random.Random(seed), pack.registry, pack.ontology, n)
    g = build_grid(msgs, include_partial=partial)
    fast = extract_relations(g, pack.relations, cfg, pack.ontology)
    slow = brute_force_relations(list(g.messages()), pack.relations, cfg, pack.ontology, g.sources)
    assert [r.key() for r in fast] == [r.key() for r in slow]
    # axis soundness
    for r in fast:
        same = r.from_msg.source == r.to_msg.source
        assert same == (r.axis == "diachronic")
        assert r.from_msg.type_name == r.to_msg.type_name


@settings(max_examples=500, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(0, 40), st.integers(0, 2))
def test_window_monotone(seed, n, w):
    from evosum import football_pack
    pack = football_pack()
    g = build_grid(random_messages(random.Random(seed), pack.registry, pack.ontology, n))
    small = extract_relations(g, pack.relations, RelationConfig(window=w), pack.ontology)
    big = extract_relations(g, pack.relations, RelationConfig(window=w + 1), pack.ontology)
    sync_big = {r.key() for r in big if r.axis == "synchronic"}
    assert {r.key() for r in small if r.axis == "synchronic"} <= sync_big


@settings(max_examples=500, deadline=None)
@given(st.integers(0, 100), st.integers(0, 100), st.integers(1, 3))
def test_value_family_exclusive(v1, v2, gap):
    from evosum import football_pack
    pack = football_pack()
    cfg = RelationConfig(max_diachronic_distance=3)
    dia = names(run(pack, [perf(v1, time=1), perf(v2, time=1 + gap)], cfg))
    family = [n for _, n in dia if n in ("Positive Graduation", "Stability", "Negative Graduation")]
    assert len(family) == 1
    sync = [n for _, n in names(run(pack, [perf(v1, source="A"), perf(v2, source="B")], cfg))]
    if v1 == v2:
        assert "Agreement" in sync and "Disagreement" not in sync
        assert "Near Agreement" not in sync
    assert not ({"Agreement", "Near Agreement"} <= set(sync))
