"""Declarative synchronic and diachronic relations between same-type messages.

A relation spec fixes the axis (which also fixes the source condition and
the temporal distance) and a conjunction of per-slot predicates over the
pair (from, to). Optional ``alternatives`` add a disjunction: at least one
listed conjunction must hold as well.

Synchronic pairs (different sources, times within ``window``) are oriented
by source order; diachronic pairs (same source, 0 < dt <= max distance) are
oriented by time.
"""
from __future__ import annotations

import bisect
import json
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import RelationSpecError
from .predicates import (ALL_SLOTS, NUMERIC_COMPARATORS, TAXONOMIC_COMPARATORS,
                         compare, parse_predicate)
from .schema import DEGREE, UNFILLED, Message, SchemaRegistry

SYNCHRONIC = "synchronic"
DIACHRONIC = "diachronic"
FILL_CONDITIONS = ("any", "unequal")


@dataclass(frozen=True)
class RelationConfig:
    window: int = 0
    max_diachronic_distance: int = 1
    delta: int = 10  # default tolerance of approx_equal on the Degree scale

    def __post_init__(self):
        if self.window < 0:
            raise RelationSpecError("window must be >= 0")
        if self.max_diachronic_distance < 1:
            raise RelationSpecError("max_diachronic_distance must be >= 1")
        if self.delta < 0:
            raise RelationSpecError("delta must be >= 0")


@dataclass(frozen=True)
class RelationSpec:
    name: str
    axis: str
    message_types: Optional[tuple]  # None: every type
    predicates: tuple = ()
    alternatives: tuple = ()
    # declared distance; the bound applied at run time is RelationConfig's
    temporal_distance: int = 0
    source_condition: str = "different"
    exclude_types: frozenset = frozenset()
    allow_partial: bool = False
    fill_condition: str = "any"
    author_defined: bool = False

    def __post_init__(self):
        if self.axis == SYNCHRONIC:
            if self.temporal_distance != 0 or self.source_condition != "different":
                raise RelationSpecError(
                    f"{self.name}: synchronic relations need distance 0 and different sources")
        elif self.axis == DIACHRONIC:
            if self.temporal_distance < 1 or self.source_condition != "same":
                raise RelationSpecError(
                    f"{self.name}: diachronic relations need distance >= 1 and the same source")
        else:
            raise RelationSpecError(f"{self.name}: unknown axis {self.axis!r}")
        if self.fill_condition not in FILL_CONDITIONS:
            raise RelationSpecError(f"{self.name}: unknown fill_condition {self.fill_condition!r}")

    def key(self) -> tuple:
        return (self.axis, self.name)

    def applies_to(self, type_name: str) -> bool:
        if type_name in self.exclude_types:
            return False
        return self.message_types is None or type_name in self.message_types


@dataclass(frozen=True)
class RelationInstance:
    name: str
    axis: str
    from_msg: Message
    to_msg: Message

    def key(self) -> tuple:
        return (self.axis, self.name, self.from_msg.key(), self.to_msg.key())

    def to_dict(self) -> dict:
        return {"relation": self.name, "axis": self.axis,
                "from": self.from_msg.to_dict(), "to": self.to_msg.to_dict()}

    @classmethod
    def from_dict(cls, d) -> "RelationInstance":
        return cls(d["relation"], d["axis"], Message.from_dict(d["from"]), Message.from_dict(d["to"]))

    def __repr__(self):
        return f"{self.name}[{self.axis[0]}]({self.from_msg!r} -> {self.to_msg!r})"


# -- loading ---------------------------------------------------------------

def _parse_spec(rec: dict) -> RelationSpec:
    name = rec.get("name")
    if not isinstance(name, str) or not name:
        raise RelationSpecError(f"relation spec without a name: {rec!r}")
    axis = rec.get("axis")
    types = rec.get("message_types", rec.get("message_type"))
    if types is None:
        raise RelationSpecError(f"{name}: message_types missing")
    if types == "*":
        types = None
    elif isinstance(types, str):
        types = (types,)
    else:
        types = tuple(types)
    default_distance = 0 if axis == SYNCHRONIC else 1
    default_source = "different" if axis == SYNCHRONIC else "same"
    try:
        preds = tuple(parse_predicate(p) for p in rec.get("predicates", ()))
        alts = tuple(tuple(parse_predicate(p) for p in clause)
                     for clause in rec.get("alternatives", ()))
    except Exception as exc:
        raise RelationSpecError(f"{name}: {exc}") from exc
    return RelationSpec(
        name=name, axis=axis, message_types=types, predicates=preds, alternatives=alts,
        temporal_distance=int(rec.get("temporal_distance", default_distance)),
        source_condition=rec.get("source_condition", default_source),
        exclude_types=frozenset(rec.get("exclude_types", ())),
        allow_partial=bool(rec.get("allow_partial", False)),
        fill_condition=rec.get("fill_condition", "any"),
        author_defined=bool(rec.get("author_defined", False)),
    )


def _check_against_registry(spec: RelationSpec, registry: SchemaRegistry):
    types = spec.message_types if spec.message_types is not None else registry.message_types
    for t in types:
        if t not in registry:
            raise RelationSpecError(f"{spec.name}: unknown message type {t!r}")
    for t in spec.exclude_types:
        if t not in registry:
            raise RelationSpecError(f"{spec.name}: unknown excluded type {t!r}")
    preds = list(spec.predicates) + [p for clause in spec.alternatives for p in clause]
    for t in types:
        if not spec.applies_to(t):
            continue
        schema = registry[t]
        for p in preds:
            if p.slot == ALL_SLOTS:
                continue
            if p.slot not in schema.slot_names:
                raise RelationSpecError(f"{spec.name}: {t} has no slot {p.slot!r}")
            vt = schema.arg(p.slot).value_type
            if p.comparator in NUMERIC_COMPARATORS and vt != (DEGREE,):
                raise RelationSpecError(f"{spec.name}: {p!r} needs a Degree slot")
            if p.comparator in TAXONOMIC_COMPARATORS and DEGREE in vt:
                raise RelationSpecError(f"{spec.name}: {p!r} needs a symbolic slot")


def load_relation_specs(text: str, registry: Optional[SchemaRegistry] = None) -> list:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RelationSpecError(f"relation spec file is not valid JSON: {exc}") from exc
    records = data.get("relations") if isinstance(data, dict) else data
    if not isinstance(records, list):
        raise RelationSpecError("relation spec file must hold a list of relations")
    specs = [_parse_spec(r) for r in records]
    keys = [s.key() for s in specs]
    if len(set(keys)) != len(keys):
        raise RelationSpecError("duplicate (axis, name) among relation specs")
    if registry is not None:
        for s in specs:
            _check_against_registry(s, registry)
    return specs


def load_relation_specs_file(path, registry=None) -> list:
    with open(path, encoding="utf-8") as fh:
        return load_relation_specs(fh.read(), registry)


# -- matching --------------------------------------------------------------

def _conjunction(preds, spec, a: Message, b: Message, config, ontology) -> bool:
    for p in preds:
        slots = [n for n, _ in a.values] if p.slot == ALL_SLOTS else [p.slot]
        for s in slots:
            va, vb = a[s], b[s]
            if va is UNFILLED or vb is UNFILLED:
                if spec.allow_partial:
                    continue
                return False
            delta = config.delta if p.delta is None else p.delta
            if not compare(p.comparator, va, vb, delta=delta, ontology=ontology):
                return False
    return True


def pair_satisfies(spec: RelationSpec, a: Message, b: Message,
                   config: RelationConfig, ontology=None) -> bool:
    """Argument-level conditions of `spec` on the oriented pair (a, b)."""
    if spec.fill_condition == "unequal" and a.filled_count == b.filled_count:
        return False
    if not _conjunction(spec.predicates, spec, a, b, config, ontology):
        return False
    if spec.alternatives:
        return any(_conjunction(c, spec, a, b, config, ontology) for c in spec.alternatives)
    return True


def _eligible(spec, m: Message) -> bool:
    return spec.applies_to(m.type_name) and (spec.allow_partial or not m.partial)


def _sort_relations(rels: Iterable[RelationInstance], rank: dict) -> list:
    def key(r):
        return (r.name, r.axis, r.from_msg.time, rank[r.from_msg.source],
                r.to_msg.time, rank[r.to_msg.source],
                r.from_msg.sort_key(), r.to_msg.sort_key())
    return sorted(rels, key=key)


def extract_relations(grid, specs: Sequence[RelationSpec], config: RelationConfig = RelationConfig(),
                      ontology=None, workers: int = 1) -> list:
    """Every relation instance in `grid`, sorted by relation name, then time and source order."""
    rank = {s: i for i, s in enumerate(grid.sources)}
    # type -> source -> messages sorted by time
    index: dict = defaultdict(lambda: defaultdict(list))
    for m in grid.messages():
        index[m.type_name][m.source].append(m)
    for by_src in index.values():
        for lst in by_src.values():
            lst.sort(key=lambda m: m.time)

    def run(spec: RelationSpec, type_name: str) -> list:
        by_src = {s: [m for m in lst if _eligible(spec, m)]
                  for s, lst in index[type_name].items()}
        times = {s: [m.time for m in lst] for s, lst in by_src.items()}
        found = []
        srcs = sorted(by_src, key=rank.__getitem__)
        if spec.axis == SYNCHRONIC:
            w = config.window
            for i, s1 in enumerate(srcs):
                for s2 in srcs[i + 1:]:
                    lst2, t2 = by_src[s2], times[s2]
                    for a in by_src[s1]:
                        lo = bisect.bisect_left(t2, a.time - w)
                        hi = bisect.bisect_right(t2, a.time + w)
                        for b in lst2[lo:hi]:
                            if pair_satisfies(spec, a, b, config, ontology):
                                found.append(RelationInstance(spec.name, spec.axis, a, b))
        else:
            d = config.max_diachronic_distance
            for s in srcs:
                lst, ts = by_src[s], times[s]
                for a in lst:
                    lo = bisect.bisect_right(ts, a.time)
                    hi = bisect.bisect_right(ts, a.time + d)
                    for b in lst[lo:hi]:
                        if pair_satisfies(spec, a, b, config, ontology):
                            found.append(RelationInstance(spec.name, spec.axis, a, b))
        return found

    tasks = [(spec, t) for spec in specs for t in sorted(index) if spec.applies_to(t)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda st: run(*st), tasks))
    else:
        chunks = [run(*st) for st in tasks]
    return _sort_relations((r for c in chunks for r in c), rank)


def brute_force_relations(messages: Sequence[Message], specs: Sequence[RelationSpec],
                          config: RelationConfig = RelationConfig(), ontology=None,
                          sources: Optional[Sequence[str]] = None) -> list:
    """Reference extractor: test every ordered pair against every spec."""
    messages = list(messages)
    if sources is None:
        sources = sorted({m.source for m in messages})
    rank = {s: i for i, s in enumerate(sources)}
    specs_for = {t: [s for s in specs if s.applies_to(t)] for t in {m.type_name for m in messages}}
    out = []
    for a in messages:
        for b in messages:
            if a is b or a.type_name != b.type_name:
                continue
            dt = b.time - a.time
            for spec in specs_for[a.type_name]:
                if not spec.allow_partial and (a.partial or b.partial):
                    continue
                if spec.axis == SYNCHRONIC:
                    ok = (a.source != b.source and rank[a.source] < rank[b.source]
                          and abs(dt) <= config.window)
                else:
                    ok = (a.source == b.source and 0 < dt <= config.max_diachronic_distance)
                if ok and _oracle_args(spec, a, b, config, ontology):
                    out.append(RelationInstance(spec.name, spec.axis, a, b))
    return _sort_relations(out, rank)


def _oracle_args(spec, a: Message, b: Message, config, ontology) -> bool:
    # written independently of pair_satisfies so the two can check each other
    va, vb = a.slots, b.slots

    def clause_ok(preds):
        checks = []
        for p in preds:
            names = sorted(va) if p.slot == ALL_SLOTS else [p.slot]
            tol = config.delta if p.delta is None else p.delta
            for n in names:
                if va[n] is UNFILLED or vb[n] is UNFILLED:
                    checks.append(spec.allow_partial)
                else:
                    checks.append(compare(p.comparator, va[n], vb[n], delta=tol, ontology=ontology))
        return all(checks)

    filled_a = len([v for v in va.values() if v is not UNFILLED])
    filled_b = len([v for v in vb.values() if v is not UNFILLED])
    if spec.fill_condition == "unequal" and filled_a == filled_b:
        return False
    alternatives_ok = not spec.alternatives or any(clause_ok(c) for c in spec.alternatives)
    return clause_ok(spec.predicates) and alternatives_ok
