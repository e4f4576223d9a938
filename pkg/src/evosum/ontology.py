"""Taxonomic domain ontology: concepts linked by is-a, with named instances.

The file format is JSON::

    {"concepts": [{"id": "Player", "label": "Player", "parent": "Person",
                   "instances": ["Nalitzis"]}, ...]}

A bare list of concept records is accepted as well.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Optional

from .errors import (
    DanglingParentError,
    DuplicateIdError,
    OntologyCycleError,
    OntologyParseError,
    UnknownConceptError,
    UnknownInstanceError,
)


@dataclass(frozen=True)
class Concept:
    id: str
    label: str
    parent: Optional[str] = None
    instances: frozenset = field(default_factory=frozenset)
    # free-form extra attributes from the file (e.g. a numeric range)
    attrs: Mapping = field(default_factory=lambda: MappingProxyType({}), compare=False)


class Ontology:
    """Immutable single-parent taxonomy.

    Build one with :func:`load_ontology` or :meth:`from_concepts`; the
    constructor validates closure, acyclicity and instance uniqueness.
    """

    def __init__(self, concepts: Iterable[Concept]):
        by_id: dict[str, Concept] = {}
        for c in concepts:
            if c.id in by_id:
                raise DuplicateIdError(f"duplicate concept id {c.id!r}")
            by_id[c.id] = c
        for c in by_id.values():
            if c.parent is not None and c.parent not in by_id:
                raise DanglingParentError(
                    f"concept {c.id!r} references unknown parent {c.parent!r}")
        owner: dict[str, str] = {}
        for c in by_id.values():
            for inst in c.instances:
                if inst in owner:
                    raise DuplicateIdError(
                        f"instance {inst!r} registered under both "
                        f"{owner[inst]!r} and {c.id!r}")
                owner[inst] = c.id

        # Walk parent chains; anything revisited on a single walk is a cycle.
        depth: dict[str, int] = {}
        for cid in by_id:
            chain = []
            seen = set()
            cur: Optional[str] = cid
            while cur is not None and cur not in depth:
                if cur in seen:
                    raise OntologyCycleError(f"is-a cycle through {cur!r}")
                seen.add(cur)
                chain.append(cur)
                cur = by_id[cur].parent
            base = -1 if cur is None else depth[cur]
            for i, node in enumerate(reversed(chain)):
                depth[node] = base + 1 + i

        self._concepts = MappingProxyType(by_id)
        self._instance_owner = MappingProxyType(owner)
        self._depth = MappingProxyType(depth)
        self._children: dict[str, tuple[str, ...]] = {}
        kids: dict[str, list[str]] = {cid: [] for cid in by_id}
        for c in by_id.values():
            if c.parent is not None:
                kids[c.parent].append(c.id)
        self._children = {k: tuple(v) for k, v in kids.items()}
        self.roots = frozenset(c.id for c in by_id.values() if c.parent is None)

    @classmethod
    def from_concepts(cls, concepts: Iterable[Concept]) -> "Ontology":
        return cls(concepts)

    @property
    def concepts(self) -> Mapping[str, Concept]:
        return self._concepts

    def __contains__(self, concept_id) -> bool:
        return concept_id in self._concepts

    def __len__(self) -> int:
        return len(self._concepts)

    def __iter__(self) -> Iterator[str]:
        return iter(self._concepts)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Ontology):
            return NotImplemented
        return dict(self._concepts) == dict(other._concepts)

    def __hash__(self):
        return hash(frozenset(self._concepts.values()))

    def concept(self, concept_id: str) -> Concept:
        try:
            return self._concepts[concept_id]
        except KeyError:
            raise UnknownConceptError(f"unknown concept {concept_id!r}") from None

    def has_instance(self, instance: str) -> bool:
        return instance in self._instance_owner

    def is_a(self, sub: str, sup: str) -> bool:
        """Reflexive, transitive subsumption test: is `sub` a kind of `sup`?"""
        self.concept(sub)
        self.concept(sup)
        # depth lets us stop as soon as we climb above sup's level
        target_depth = self._depth[sup]
        cur: Optional[str] = sub
        while cur is not None and self._depth[cur] >= target_depth:
            if cur == sup:
                return True
            cur = self._concepts[cur].parent
        return False

    def ancestors(self, concept_id: str) -> tuple[str, ...]:
        """Parent chain from `concept_id` (inclusive) up to its root."""
        out = []
        cur: Optional[str] = self.concept(concept_id).id
        while cur is not None:
            out.append(cur)
            cur = self._concepts[cur].parent
        return tuple(out)

    def children(self, concept_id: str) -> tuple[str, ...]:
        self.concept(concept_id)
        return self._children[concept_id]

    def descendants(self, concept_id: str) -> tuple[str, ...]:
        """`concept_id` and every concept below it, in pre-order."""
        self.concept(concept_id)
        out, stack = [], [concept_id]
        while stack:
            cur = stack.pop()
            out.append(cur)
            stack.extend(reversed(self._children[cur]))
        return tuple(out)

    def concept_of_instance(self, instance: str) -> str:
        try:
            return self._instance_owner[instance]
        except KeyError:
            raise UnknownInstanceError(f"unknown instance {instance!r}") from None

    def instances_under(self, concept_id: str) -> frozenset:
        """All instances registered on `concept_id` or any concept below it."""
        return frozenset(
            inst for cid in self.descendants(concept_id)
            for inst in self._concepts[cid].instances)

    def concept_of_value(self, value: str) -> str:
        """Concept a symbolic slot value denotes: itself if it is a concept id,
        otherwise the owner of the instance."""
        if value in self._concepts:
            return value
        return self.concept_of_instance(value)

    def to_dict(self) -> dict:
        concepts = []
        for c in self._concepts.values():
            rec = {"id": c.id, "label": c.label}
            if c.parent is not None:
                rec["parent"] = c.parent
            rec["instances"] = sorted(c.instances)
            rec.update(dict(c.attrs))
            concepts.append(rec)
        return {"concepts": concepts}


_KNOWN_KEYS = {"id", "label", "parent", "instances"}


def load_ontology(text: str) -> Ontology:
    """Parse ontology JSON text into a validated :class:`Ontology`."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise OntologyParseError(f"ontology is not valid JSON: {exc}") from exc
    if isinstance(data, dict):
        records = data.get("concepts")
    else:
        records = data
    if not isinstance(records, list):
        raise OntologyParseError("ontology must be a list of concepts or "
                                 "an object with a 'concepts' list")
    concepts = []
    for i, rec in enumerate(records):
        if not isinstance(rec, dict) or not isinstance(rec.get("id"), str):
            raise OntologyParseError(f"concept #{i} lacks a string 'id'")
        parent = rec.get("parent")
        if parent is not None and not isinstance(parent, str):
            raise OntologyParseError(f"concept {rec['id']!r}: parent must be a string")
        instances = rec.get("instances", [])
        if not isinstance(instances, list) or not all(isinstance(x, str) for x in instances):
            raise OntologyParseError(f"concept {rec['id']!r}: instances must be strings")
        if len(set(instances)) != len(instances):
            raise DuplicateIdError(f"concept {rec['id']!r} lists an instance twice")
        extra = {k: v for k, v in rec.items() if k not in _KNOWN_KEYS}
        concepts.append(Concept(
            id=rec["id"],
            label=rec.get("label", rec["id"]),
            parent=parent,
            instances=frozenset(instances),
            attrs=MappingProxyType(extra),
        ))
    return Ontology(concepts)


def load_ontology_file(path) -> Ontology:
    with open(path, encoding="utf-8") as fh:
        return load_ontology(fh.read())
