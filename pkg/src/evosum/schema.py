"""Message types with ontology-typed slots, and time/source-tagged messages."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterator, Mapping, Optional, Sequence

from .errors import SchemaError, TimeResolutionError, UnknownSchemaError
from .ontology import Ontology
from .predicates import Predicate, compare, parse_predicate

DEGREE = "Degree"
TIMESPAN = "TimeSpan"
PRIMITIVES = frozenset({DEGREE, TIMESPAN})
TEMPORAL_ROOT = "Temporal_Concept"
NONE_TYPE = "None"
DEGREE_RANGE = (0, 100)


class _Unfilled:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNFILLED"

    def __reduce__(self):
        return (_Unfilled, ())

    def __bool__(self):
        return False


UNFILLED = _Unfilled()


def value_sort_key(v):
    """Total order over slot values of mixed kinds (ints, strings, UNFILLED)."""
    if v is UNFILLED:
        return (2, 0, "")
    if isinstance(v, int):
        return (0, v, "")
    return (1, 0, str(v))


@dataclass(frozen=True)
class ArgumentSpec:
    name: str
    # one or more alternatives: concept ids, or the primitives Degree / TimeSpan
    value_type: tuple

    def __repr__(self):
        vt = " | ".join(self.value_type)
        return f"{self.name}: {vt}"


@dataclass(frozen=True)
class MessageSchema:
    type_name: str
    args: tuple = ()
    constraints: tuple = ()
    illustrative: bool = False

    @property
    def slot_names(self) -> tuple:
        return tuple(a.name for a in self.args)

    def arg(self, name: str) -> ArgumentSpec:
        for a in self.args:
            if a.name == name:
                return a
        raise KeyError(name)


@dataclass(frozen=True, order=False)
class Message:
    """A typed incident report. `values` is a tuple of (slot, value) pairs
    sorted by slot name; `provenance` is (document id, sentence indexes)."""

    type_name: str
    values: tuple
    time: int
    source: str
    provenance: tuple = ("", ())

    @classmethod
    def create(cls, type_name: str, values: Mapping[str, Any], time: int, source: str,
               document: str = "", sentences: Sequence[int] = ()) -> "Message":
        items = tuple(sorted(values.items()))
        return cls(type_name, items, time, source, (document, tuple(sentences)))

    def __getitem__(self, slot: str):
        for name, v in self.values:
            if name == slot:
                return v
        raise KeyError(slot)

    def get(self, slot: str, default=None):
        try:
            return self[slot]
        except KeyError:
            return default

    @property
    def slots(self) -> dict:
        return dict(self.values)

    @cached_property
    def partial(self) -> bool:
        return any(v is UNFILLED for _, v in self.values)

    @cached_property
    def filled_count(self) -> int:
        return sum(v is not UNFILLED for _, v in self.values)

    @property
    def document(self) -> str:
        return self.provenance[0]

    def key(self) -> tuple:
        """Content key used for scoring: type, time, source and slot values."""
        return (self.type_name, self.time, self.source, self.values)

    def sort_key(self) -> tuple:
        doc, sents = self.provenance
        return (self.time, self.source, self.type_name,
                tuple((n, value_sort_key(v)) for n, v in self.values), doc, sents)

    def with_provenance(self, document: str, sentences: Sequence[int]) -> "Message":
        return Message(self.type_name, self.values, self.time, self.source,
                       (document, tuple(sentences)))

    def to_dict(self) -> dict:
        return {
            "type": self.type_name,
            "time": self.time,
            "source": self.source,
            "values": {n: (None if v is UNFILLED else v) for n, v in self.values},
            "provenance": {"document": self.provenance[0],
                           "sentences": list(self.provenance[1])},
            "partial": self.partial,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "Message":
        prov = d.get("provenance") or {}
        values = {n: (UNFILLED if v is None else v) for n, v in d["values"].items()}
        return cls.create(d["type"], values, d["time"], d["source"],
                          prov.get("document", ""), prov.get("sentences", ()))

    def __repr__(self):
        args = ", ".join(repr(v) if v is UNFILLED else str(v) for _, v in self.values)
        return f"{self.type_name}({args})@{self.time}/{self.source}"


class SchemaRegistry(Mapping):
    """Read-only map type_name -> MessageSchema, always holding ``None``."""

    def __init__(self, schemas):
        self._schemas = {NONE_TYPE: MessageSchema(NONE_TYPE)}
        for s in schemas:
            if s.type_name in self._schemas:
                raise SchemaError(f"duplicate message type {s.type_name!r}")
            self._schemas[s.type_name] = s

    def __getitem__(self, name) -> MessageSchema:
        try:
            return self._schemas[name]
        except KeyError:
            raise UnknownSchemaError(f"unknown message type {name!r}") from None

    def __iter__(self) -> Iterator[str]:
        return iter(self._schemas)

    def __len__(self) -> int:
        return len(self._schemas)

    @property
    def message_types(self) -> tuple:
        """Declared types, excluding the reserved None class."""
        return tuple(n for n in self._schemas if n != NONE_TYPE)


def _check_type_ref(ref: str, ontology: Ontology, where: str):
    if ref in PRIMITIVES:
        return
    if ref not in ontology:
        raise SchemaError(f"{where}: unknown concept {ref!r}")


def load_schemas(text: str, ontology: Ontology) -> SchemaRegistry:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"schema file is not valid JSON: {exc}") from exc
    records = data.get("schemas") if isinstance(data, dict) else data
    if not isinstance(records, list):
        raise SchemaError("schema file must hold a list of schemas")
    schemas = []
    for rec in records:
        name = rec.get("type_name")
        if not isinstance(name, str) or not name:
            raise SchemaError(f"schema without type_name: {rec!r}")
        if name == NONE_TYPE:
            raise SchemaError("'None' is reserved for non-message sentences")
        args = []
        seen = set()
        for a in rec.get("args", []):
            vt = a["value_type"]
            refs = (vt,) if isinstance(vt, str) else tuple(vt)
            if not refs:
                raise SchemaError(f"{name}.{a['name']}: empty value_type")
            for ref in refs:
                _check_type_ref(ref, ontology, f"{name}.{a['name']}")
            if a["name"] in seen:
                raise SchemaError(f"{name}: duplicate slot {a['name']!r}")
            seen.add(a["name"])
            args.append(ArgumentSpec(a["name"], refs))
        constraints = tuple(parse_predicate(c, kind="constraint")
                            for c in rec.get("constraints", []))
        for c in constraints:
            for slot in (c.slot, c.other):
                if slot is not None and slot not in seen:
                    raise SchemaError(f"{name}: constraint references unknown slot {slot!r}")
        schemas.append(MessageSchema(name, tuple(args), constraints,
                                     bool(rec.get("illustrative", False))))
    return SchemaRegistry(schemas)


def load_schemas_file(path, ontology: Ontology) -> SchemaRegistry:
    with open(path, encoding="utf-8") as fh:
        return load_schemas(fh.read(), ontology)


def degree_range(ontology: Optional[Ontology]) -> tuple:
    if ontology is not None and DEGREE in ontology:
        rng = ontology.concept(DEGREE).attrs.get("range")
        if rng:
            return tuple(rng)
    return DEGREE_RANGE


def check_value(arg: ArgumentSpec, value, ontology: Ontology) -> Optional[str]:
    """Return a violation message, or None if `value` fits one of the slot's types."""
    reasons = []
    for ref in arg.value_type:
        if ref == DEGREE:
            lo, hi = degree_range(ontology)
            if isinstance(value, int) and not isinstance(value, bool):
                if lo <= value <= hi:
                    return None
                reasons.append(f"Degree out of range [{lo}, {hi}]: {value}")
            else:
                reasons.append(f"Degree expects an integer, got {value!r}")
            continue
        if not isinstance(value, str):
            reasons.append(f"expected a symbolic value, got {value!r}")
            continue
        target = TEMPORAL_ROOT if ref == TIMESPAN else ref
        try:
            concept = ontology.concept_of_value(value)
        except KeyError:
            reasons.append(f"{value!r} is not a known instance or concept")
            continue
        if ontology.is_a(concept, target):
            return None
        reasons.append(f"{value!r} ({concept}) is not a {target}")
    # first reason is the most specific for single-type slots
    return f"slot {arg.name!r}: " + "; ".join(dict.fromkeys(reasons))


@dataclass(frozen=True)
class ValidationResult:
    violations: tuple = ()
    warnings: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def validate_message(msg: Message, registry: SchemaRegistry, ontology: Ontology) -> ValidationResult:
    schema = registry[msg.type_name]
    violations, warnings = [], []
    slots = msg.slots
    expected = set(schema.slot_names)
    for missing in sorted(expected - slots.keys()):
        violations.append(f"slot {missing!r} missing")
    for extra in sorted(slots.keys() - expected):
        violations.append(f"slot {extra!r} not declared by {schema.type_name}")
    for arg in schema.args:
        if arg.name not in slots:
            continue
        v = slots[arg.name]
        if v is UNFILLED:
            warnings.append(f"slot {arg.name!r} unfilled")
            continue
        problem = check_value(arg, v, ontology)
        if problem:
            violations.append(problem)
    for c in schema.constraints:
        left = slots.get(c.slot, UNFILLED)
        if c.other is not None:
            right = slots.get(c.other, UNFILLED)
        elif c.has_literal:
            right = c.value
        else:
            violations.append(f"constraint {c!r} has no right operand")
            continue
        if left is UNFILLED or right is UNFILLED:
            warnings.append(f"constraint {c!r} skipped (unfilled slot)")
            continue
        try:
            holds = compare(c.comparator, left, right, delta=c.delta or 0, ontology=ontology)
        except Exception as exc:  # ill-typed operands count as a violation
            violations.append(f"constraint {c!r} not evaluable: {exc}")
            continue
        if not holds:
            violations.append(f"constraint {c!r} violated")
    if not isinstance(msg.time, int) or msg.time < 0:
        violations.append(f"time must be a non-negative integer, got {msg.time!r}")
    if not msg.source:
        violations.append("source missing")
    return ValidationResult(tuple(violations), tuple(warnings))


def resolve_time(pub_time: int, temporal_offset: Optional[int] = None) -> int:
    """Time a message refers to: the publication round, shifted by an
    explicit temporal offset when the sentence carries one."""
    if pub_time < 0:
        raise TimeResolutionError(f"publication time must be >= 0, got {pub_time}")
    t = pub_time if temporal_offset is None else pub_time + temporal_offset
    if t < 0:
        raise TimeResolutionError(
            f"offset {temporal_offset} moves round {pub_time} before round 0")
    return t
