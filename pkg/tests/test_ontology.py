import json

import pytest
from hypothesis import given, settings

from evosum.errors import (DanglingParentError, DuplicateIdError, OntologyCycleError,
                           OntologyParseError, UnknownConceptError, UnknownInstanceError)
from evosum.ontology import Ontology, load_ontology
from helpers import taxonomies

SMALL = json.dumps({"concepts": [
    {"id": "Person", "label": "Person"},
    {"id": "Referee", "label": "Referee", "parent": "Person", "instances": ["Kakkos"]},
    {"id": "Player", "label": "Player", "parent": "Person", "instances": ["Nalitzis"]},
    {"id": "Team", "label": "Team", "instances": ["PAOK"]},
    {"id": "Card", "label": "Card"},
    {"id": "Yellow", "label": "Yellow", "parent": "Card"},
    {"id": "Red", "label": "Red", "parent": "Card"},
]})


@pytest.fixture
def small():
    return load_ontology(SMALL)


def test_fig2_excerpt_structure(small):
    assert small.concept("Referee").parent == "Person"
    assert set(small.children("Card")) == {"Yellow", "Red"}
    assert small.roots == {"Person", "Team", "Card"}


def test_is_a_basics(small):
    assert small.is_a("Referee", "Person")
    assert small.is_a("Person", "Person")
    assert not small.is_a("Person", "Referee")
    assert not small.is_a("Yellow", "Person")


def test_concept_of_instance(small):
    assert small.concept_of_instance("Nalitzis") == "Player"
    assert small.concept_of_instance("PAOK") == "Team"
    with pytest.raises(UnknownInstanceError):
        small.concept_of_instance("Nobody")


def test_unknown_concept(small):
    with pytest.raises(UnknownConceptError):
        small.is_a("Unicorn", "Person")


def test_self_parent_is_a_cycle():
    with pytest.raises(OntologyCycleError):
        load_ontology('[{"id": "X", "label": "X", "parent": "X"}]')


def test_longer_cycle():
    text = json.dumps([{"id": "A", "label": "A", "parent": "B"},
                       {"id": "B", "label": "B", "parent": "A"}])
    with pytest.raises(OntologyCycleError):
        load_ontology(text)


def test_empty_ontology():
    o = load_ontology('{"concepts": []}')
    assert len(o) == 0 and o.roots == frozenset()


@pytest.mark.parametrize("text, exc", [
    ('[{"id": "A", "label": "A"}, {"id": "A", "label": "A"}]', DuplicateIdError),
    ('[{"id": "A", "label": "A", "parent": "Z"}]', DanglingParentError),
    ('[{"id": "A", "label": "A", "instances": ["x"]}, {"id": "B", "label": "B", "instances": ["x"]}]',
     DuplicateIdError),
    ('not json', OntologyParseError),
])
def test_malformed(text, exc):
    with pytest.raises(exc):
        load_ontology(text)


def test_instances_under_and_descendants(small):
    assert small.instances_under("Person") == {"Kakkos", "Nalitzis"}
    assert set(small.descendants("Card")) == {"Card", "Yellow", "Red"}
    assert small.ancestors("Referee") == ("Referee", "Person")


def test_bundled_ontology(onto):
    assert onto.is_a("Assistant_Referee", "Person")
    assert not onto.is_a("Assistant_Referee", "Referee")
    assert onto.is_a("Organized_Fans", "Spectators")
    assert onto.is_a("Yellow", "Card") and onto.is_a("Red", "Card")
    assert onto.concept_of_instance("Nalitzis") == "Player"
    assert onto.concept("Degree").attrs["range"] == [0, 100]


def test_round_trip(small):
    again = load_ontology(json.dumps(small.to_dict()))
    assert again == small


@settings(max_examples=500, deadline=None)
@given(taxonomies())
def test_is_a_reflexive_transitive_antisymmetric(o):
    ids = sorted(o)
    for a in ids:
        assert o.is_a(a, a)
    for a in ids:
        for b in ids:
            if o.is_a(a, b):
                if o.is_a(b, a):
                    assert a == b
                for c in ids:
                    if o.is_a(b, c):
                        assert o.is_a(a, c)
            # is_a agrees with walking the parent chain
            assert o.is_a(a, b) == (b in o.ancestors(a))


@settings(max_examples=200, deadline=None)
@given(taxonomies())
def test_load_is_deterministic(o):
    text = json.dumps(o.to_dict())
    assert load_ontology(text) == load_ontology(text)
    assert load_ontology(text).to_dict() == load_ontology(text).to_dict()
