"""Comparator grammar shared by schema constraints and relation specs.

A predicate is written either as a JSON object::

    {"comparator": "approx_equal", "slot": "value", "delta": 10}
    {"comparator": "not_equal", "slot": "entity", "other": "opponent"}
    {"comparator": "less", "slot": "value", "value": 100}

or in the compact string form ``comparator(slot[, arg])``, where a numeric
``arg`` is a tolerance (relations) or a literal (constraints) and an
identifier ``arg`` names a second slot (constraints only).

In a relation predicate the comparator is applied to the slot value of the
first endpoint (left) and the same slot of the second endpoint (right).
The pseudo-slot ``*`` stands for every slot of the message type.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Any, Optional

from .errors import PredicateError

COMPARATORS = frozenset({
    "equal", "not_equal", "approx_equal", "less", "greater",
    "subsumes", "subsumed_by", "any",
})
NUMERIC_COMPARATORS = frozenset({"approx_equal", "less", "greater"})
TAXONOMIC_COMPARATORS = frozenset({"subsumes", "subsumed_by"})
ALL_SLOTS = "*"

_NO_VALUE = object()


@dataclass(frozen=True)
class Predicate:
    comparator: str
    slot: str
    delta: Optional[int] = None
    other: Optional[str] = None
    value: Any = _NO_VALUE

    def __post_init__(self):
        if self.comparator not in COMPARATORS:
            raise PredicateError(f"unknown comparator {self.comparator!r}")
        if self.delta is not None and (not isinstance(self.delta, int) or self.delta < 0):
            raise PredicateError(f"delta must be a non-negative integer, got {self.delta!r}")
        if self.slot == ALL_SLOTS and self.comparator not in {"equal", "any"}:
            raise PredicateError("the '*' slot only supports 'equal' and 'any'")

    @property
    def has_literal(self) -> bool:
        return self.value is not _NO_VALUE

    def to_dict(self) -> dict:
        out = {"comparator": self.comparator, "slot": self.slot}
        if self.delta is not None:
            out["delta"] = self.delta
        if self.other is not None:
            out["other"] = self.other
        if self.has_literal:
            out["value"] = self.value
        return out

    def __repr__(self):
        extra = ""
        if self.delta is not None:
            extra = f", {self.delta}"
        elif self.other is not None:
            extra = f", {self.other}"
        elif self.has_literal:
            extra = f", {self.value!r}"
        return f"{self.comparator}({self.slot}{extra})"


_COMPACT = re.compile(r"^\s*(\w+)\s*\(\s*([\w*]+)\s*(?:,\s*([^)]+?)\s*)?\)\s*$")


def parse_predicate(obj, *, kind: str = "relation") -> Predicate:
    """Parse a predicate from its JSON object or compact string form.

    `kind` is ``"relation"`` (second argument is a tolerance) or
    ``"constraint"`` (second argument is a literal or another slot).
    """
    if isinstance(obj, Predicate):
        return obj
    if isinstance(obj, str):
        m = _COMPACT.match(obj)
        if not m:
            raise PredicateError(f"cannot parse predicate {obj!r}")
        comparator, slot, arg = m.groups()
        rec: dict = {"comparator": comparator, "slot": slot}
        if arg is not None:
            number = _as_int(arg)
            if kind == "relation":
                if number is None:
                    raise PredicateError(f"relation predicate tolerance must be an integer: {obj!r}")
                rec["delta"] = number
            elif number is not None:
                rec["value"] = number
            else:
                rec["other"] = arg
        obj = rec
    if not isinstance(obj, dict):
        raise PredicateError(f"predicate must be an object or string, got {type(obj).__name__}")
    unknown = set(obj) - {"comparator", "slot", "delta", "other", "value"}
    if unknown:
        raise PredicateError(f"unknown predicate fields {sorted(unknown)}")
    if "comparator" not in obj or "slot" not in obj:
        raise PredicateError(f"predicate needs 'comparator' and 'slot': {obj!r}")
    if kind == "relation" and ("other" in obj or "value" in obj):
        raise PredicateError("relation predicates compare the same slot on both messages")
    if kind == "constraint" and "other" in obj and "value" in obj:
        raise PredicateError("constraint has both 'other' and 'value'")
    return Predicate(
        comparator=obj["comparator"],
        slot=obj["slot"],
        delta=obj.get("delta"),
        other=obj.get("other"),
        value=obj.get("value", _NO_VALUE),
    )


def _as_int(text: str):
    try:
        return int(text)
    except ValueError:
        return None


def subsumes(general, specific, ontology) -> bool:
    """True when symbolic value `general` is strictly more general than `specific`.

    Values are concept ids or instance ids. An instance denotes its owning
    concept; two distinct instances of the same concept are peers, so an
    instance only subsumes values whose concept lies strictly below its own.
    """
    if not isinstance(general, str) or not isinstance(specific, str):
        return False
    if general == specific:
        return False
    g = ontology.concept_of_value(general)
    s = ontology.concept_of_value(specific)
    if not ontology.is_a(s, g):
        return False
    return general in ontology.concepts or g != s


def compare(comparator: str, left, right, *, delta: int = 0, ontology=None) -> bool:
    if comparator == "any":
        return True
    if comparator == "equal":
        return left == right
    if comparator == "not_equal":
        return left != right
    if comparator in NUMERIC_COMPARATORS:
        if not (_is_int(left) and _is_int(right)):
            raise PredicateError(f"{comparator} needs integer operands, got {left!r}, {right!r}")
        if comparator == "approx_equal":
            return abs(left - right) <= delta
        if comparator == "less":
            return left < right
        return left > right
    if ontology is None:
        raise PredicateError(f"{comparator} needs an ontology")
    if comparator == "subsumes":
        return subsumes(left, right, ontology)
    return subsumes(right, left, ontology)


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)
