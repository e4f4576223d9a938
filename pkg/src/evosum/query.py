"""Structured queries over the grid, and template rendering of the answer.

A query selects messages by entity, type, time range and source; the
answer (a subgrid) also carries every relation whose two endpoints were
selected. A relation filter keeps only the named relations and the
messages they connect.
"""
from __future__ import annotations

import json
import logging
import string
from dataclasses import dataclass, field
from types import SimpleNamespace
from typing import Mapping, Optional, Sequence

from .errors import QueryError, TemplateError
from .grid import Grid
from .relations import RelationInstance, _sort_relations
from .schema import UNFILLED, Message

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Query:
    entities: frozenset = frozenset()
    types: frozenset = frozenset()
    time_range: Optional[tuple] = None  # inclusive (first, last)
    sources: frozenset = frozenset()
    relations: frozenset = frozenset()
    entity_slots: tuple = ("entity",)

    def __post_init__(self):
        for name in ("entities", "types", "sources", "relations"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))
        if self.time_range is not None:
            lo, hi = self.time_range
            if lo > hi:
                raise QueryError(f"empty time range {self.time_range}")
            object.__setattr__(self, "time_range", (int(lo), int(hi)))
        if not (self.entities or self.types or self.sources or self.relations
                or self.time_range is not None):
            raise QueryError("a query needs at least one filter")

    def to_dict(self) -> dict:
        d = {}
        for name in ("entities", "types", "sources", "relations"):
            vals = getattr(self, name)
            if vals:
                d[name] = sorted(vals)
        if self.time_range is not None:
            d["time_range"] = list(self.time_range)
        if self.entity_slots != ("entity",):
            d["entity_slots"] = list(self.entity_slots)
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "Query":
        unknown = set(d) - {"entities", "types", "time_range", "sources", "relations", "entity_slots"}
        if unknown:
            raise QueryError(f"unknown query fields {sorted(unknown)}")
        tr = d.get("time_range")
        return cls(
            entities=frozenset(d.get("entities", ())),
            types=frozenset(d.get("types", ())),
            time_range=tuple(tr) if tr is not None else None,
            sources=frozenset(d.get("sources", ())),
            relations=frozenset(d.get("relations", ())),
            entity_slots=tuple(d.get("entity_slots", ("entity",))),
        )


@dataclass(frozen=True)
class Subgrid:
    messages: tuple
    relations: tuple
    sources: tuple = field(default=())

    def __len__(self):
        return len(self.messages)

    def to_dict(self) -> dict:
        return {"sources": list(self.sources),
                "messages": [m.to_dict() for m in self.messages],
                "relations": [r.to_dict() for r in self.relations]}

    @classmethod
    def from_dict(cls, d: Mapping) -> "Subgrid":
        return cls(tuple(Message.from_dict(m) for m in d["messages"]),
                   tuple(RelationInstance.from_dict(r) for r in d["relations"]),
                   tuple(d.get("sources", ())))


def expand_entities(entities, ontology) -> frozenset:
    """Instance ids match themselves; concept ids match their whole subtree."""
    out = set()
    for e in entities:
        if e in ontology:
            out.update(ontology.descendants(e))
            out.update(ontology.instances_under(e))
        elif ontology.has_instance(e):
            out.add(e)
        else:
            raise QueryError(f"unknown entity {e!r}")
    return frozenset(out)


def _relation_selected(rel: RelationInstance, names) -> bool:
    return rel.name in names or f"{rel.axis}:{rel.name}" in names


def run_query(grid: Grid, relations: Sequence[RelationInstance], query: Query, ontology,
              registry=None, relation_names: Optional[Sequence[str]] = None) -> Subgrid:
    if query.entities:
        wanted = expand_entities(query.entities, ontology)
    if registry is not None:
        for t in query.types:
            if t not in registry:
                raise QueryError(f"unknown message type {t!r}")
    for s in query.sources:
        if s not in grid.sources:
            raise QueryError(f"unknown source {s!r}")
    if relation_names is not None:
        known = set(relation_names)
        for r in query.relations:
            if r not in known and r.split(":", 1)[-1] not in known:
                raise QueryError(f"unknown relation {r!r}")

    def passes(m: Message) -> bool:
        if query.types and m.type_name not in query.types:
            return False
        if query.sources and m.source not in query.sources:
            return False
        if query.time_range is not None and not (
                query.time_range[0] <= m.time <= query.time_range[1]):
            return False
        if query.entities and not any(
                m.get(slot, UNFILLED) in wanted for slot in query.entity_slots):
            return False
        return True

    selected = {m for m in grid.messages() if passes(m)}
    rels = [r for r in relations if r.from_msg in selected and r.to_msg in selected]
    if query.relations:
        rels = [r for r in rels if _relation_selected(r, query.relations)]
        selected = {m for r in rels for m in (r.from_msg, r.to_msg)}
    rank = {s: i for i, s in enumerate(grid.sources)}
    msgs = sorted(selected, key=lambda m: (m.time, rank[m.source], m.type_name, m.sort_key()))
    return Subgrid(tuple(msgs), tuple(_sort_relations(rels, rank)), grid.sources)


# -- rendering -------------------------------------------------------------

@dataclass(frozen=True)
class TemplatePack:
    relations: Mapping  # relation name or "axis:name" -> pattern
    messages: Mapping  # message type -> pattern
    labels: Mapping = field(default_factory=dict)  # value -> display text

    def relation_pattern(self, rel: RelationInstance) -> Optional[str]:
        return self.relations.get(f"{rel.axis}:{rel.name}", self.relations.get(rel.name))

    @classmethod
    def from_dict(cls, d: Mapping) -> "TemplatePack":
        return cls(dict(d.get("relations", {})), dict(d.get("messages", {})),
                   dict(d.get("labels", {})))


def load_templates(text: str) -> TemplatePack:
    try:
        return TemplatePack.from_dict(json.loads(text))
    except json.JSONDecodeError as exc:
        raise TemplateError(f"template pack is not valid JSON: {exc}") from exc


def load_templates_file(path) -> TemplatePack:
    with open(path, encoding="utf-8") as fh:
        return load_templates(fh.read())


_FORMATTER = string.Formatter()


def _fields(pattern: str) -> list:
    try:
        return [f for _, f, _, _ in _FORMATTER.parse(pattern) if f]
    except ValueError as exc:
        raise TemplateError(f"malformed template {pattern!r}: {exc}") from exc


def _message_ns(m: Message, labels: Mapping) -> dict:
    ns = {"time": m.time, "source": m.source, "type": m.type_name}
    for name, v in m.values:
        ns[name] = "?" if v is UNFILLED else labels.get(str(v), v)
    return ns


def _fill(pattern: str, ns: dict, where: str) -> str:
    for f in _fields(pattern):
        head, _, rest = f.partition(".")
        target = ns.get(head)
        if target is None or (rest and not hasattr(target, rest)):
            raise TemplateError(f"{where}: placeholder {{{f}}} has no value")
    return pattern.format_map(ns)


def render_summary(subgrid: Subgrid, templates: TemplatePack,
                   language: Optional[Mapping] = None) -> str:
    """One line per relation plus one per message no relation covers,
    ordered by time, source order, then relation or type name."""
    labels = templates.labels if language is None else language
    if not subgrid.messages and not subgrid.relations:
        log.info("no content: the query selected nothing")
        return ""
    covered = {m for r in subgrid.relations for m in (r.from_msg, r.to_msg)}
    loose = [m for m in subgrid.messages if m not in covered]
    missing = sorted({f"{r.axis}:{r.name}" for r in subgrid.relations
                      if templates.relation_pattern(r) is None}
                     | {m.type_name for m in loose if m.type_name not in templates.messages})
    if missing:
        raise TemplateError(f"no template for: {', '.join(missing)}")
    sources = list(subgrid.sources) or sorted({m.source for m in subgrid.messages})
    rank = {s: i for i, s in enumerate(sources)}
    lines = []
    for r in subgrid.relations:
        a, b = r.from_msg, r.to_msg
        ns = {"time": a.time, "source": a.source, "relation": r.name, "axis": r.axis,
              "from": SimpleNamespace(**_message_ns(a, labels)),
              "to": SimpleNamespace(**_message_ns(b, labels))}
        text = _fill(templates.relation_pattern(r), ns, f"{r.axis}:{r.name}")
        lines.append(((a.time, rank[a.source], r.name, 0, b.time, rank[b.source]), text))
    for m in loose:
        text = _fill(templates.messages[m.type_name], _message_ns(m, labels), m.type_name)
        lines.append(((m.time, rank[m.source], m.type_name, 1, m.time, rank[m.source]), text))
    lines.sort(key=lambda kv: (kv[0], kv[1]))
    return "".join(text + "\n" for _, text in lines)
