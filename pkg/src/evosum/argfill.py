"""Heuristic argument filling for classified sentences.

Rules are data. Each rule names a message type, a slot, an extractor and a
priority. For every slot the highest-priority rule that yields a well-typed
value wins; ties go to the rule declared first. Extractors:

``ne``        NE annotations whose concept is subsumed by ``concept``
              (``index`` picks the n-th match; ``mode: each`` emits one
              message per match)
``keyword``   first token found in ``map`` (token -> value)
``degree``    first token found in ``lexicon`` (token -> integer degree)
``constant``  a fixed ``value``

``map`` and ``lexicon`` may name an entry of the file's top-level ``lexicons``.
"""
from __future__ import annotations

import itertools
import json
import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .corpus import AnnotatedSentence
from .errors import ArgFillError
from .ontology import Ontology
from .schema import (NONE_TYPE, UNFILLED, Message, SchemaRegistry, check_value,
                     degree_range, resolve_time, validate_message)

log = logging.getLogger(__name__)

EXTRACTORS = ("ne", "keyword", "constant", "degree")


@dataclass(frozen=True)
class HeuristicRule:
    message_type: str
    slot: str
    extractor: str
    priority: int = 0
    concepts: tuple = ()
    index: int = 0
    mode: str = "first"
    mapping: tuple = ()  # (token, value) pairs for keyword/degree
    value: object = None
    order: int = 0  # declaration position, breaks priority ties

    def lookup(self) -> dict:
        return dict(self.mapping)


class RuleSet:
    def __init__(self, rules: Iterable[HeuristicRule]):
        self.rules = tuple(rules)
        grouped = defaultdict(lambda: defaultdict(list))
        for r in self.rules:
            grouped[r.message_type][r.slot].append(r)
        self._by_type = {
            t: {s: sorted(rs, key=lambda r: (-r.priority, r.order)) for s, rs in slots.items()}
            for t, slots in grouped.items()}

    def __len__(self):
        return len(self.rules)

    def has_type(self, message_type: str) -> bool:
        return message_type in self._by_type

    def for_slot(self, message_type: str, slot: str) -> list:
        return self._by_type.get(message_type, {}).get(slot, [])

    def lexicon(self, message_type: str, slot: str) -> Optional[HeuristicRule]:
        """First keyword/degree/ne rule for a slot (used to realize text)."""
        for r in self.for_slot(message_type, slot):
            if r.extractor != "constant":
                return r
        return None


def load_rules(text: str, registry: SchemaRegistry, ontology: Ontology) -> RuleSet:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ArgFillError(f"rules file is not valid JSON: {exc}") from exc
    lexicons = data.get("lexicons", {}) if isinstance(data, dict) else {}
    records = data.get("rules") if isinstance(data, dict) else data
    if not isinstance(records, list):
        raise ArgFillError("rules file must hold a list of rules")
    lo, hi = degree_range(ontology)
    rules = []
    for order, rec in enumerate(records):
        mtype, slot, kind = rec.get("message_type"), rec.get("slot"), rec.get("extractor")
        where = f"rule #{order} ({mtype}.{slot})"
        if mtype not in registry or mtype == NONE_TYPE:
            raise ArgFillError(f"{where}: unknown message type")
        if slot not in registry[mtype].slot_names:
            raise ArgFillError(f"{where}: unknown slot")
        if kind not in EXTRACTORS:
            raise ArgFillError(f"{where}: unknown extractor {kind!r}")
        kw = dict(message_type=mtype, slot=slot, extractor=kind,
                  priority=int(rec.get("priority", 0)), order=order)
        if kind == "ne":
            concepts = rec.get("concept")
            concepts = (concepts,) if isinstance(concepts, str) else tuple(concepts or ())
            if not concepts:
                raise ArgFillError(f"{where}: ne extractor needs a concept")
            for c in concepts:
                if c not in ontology:
                    raise ArgFillError(f"{where}: unknown concept {c!r}")
            mode = rec.get("mode", "first")
            if mode not in ("first", "each"):
                raise ArgFillError(f"{where}: mode must be 'first' or 'each'")
            kw.update(concepts=concepts, index=int(rec.get("index", 0)), mode=mode)
        elif kind in ("keyword", "degree"):
            table = rec.get("map" if kind == "keyword" else "lexicon")
            if isinstance(table, str):
                if table not in lexicons:
                    raise ArgFillError(f"{where}: unknown lexicon {table!r}")
                table = lexicons[table]
            if not isinstance(table, dict) or not table:
                raise ArgFillError(f"{where}: empty token map")
            if kind == "degree":
                for tok, v in table.items():
                    if not isinstance(v, int) or not lo <= v <= hi:
                        raise ArgFillError(f"{where}: degree {tok!r} -> {v!r} out of range")
            kw.update(mapping=tuple((k.lower(), v) for k, v in table.items()))
        else:
            if "value" not in rec:
                raise ArgFillError(f"{where}: constant extractor needs a value")
            kw.update(value=rec["value"])
        rules.append(HeuristicRule(**kw))
    return RuleSet(rules)


def load_rules_file(path, registry, ontology) -> RuleSet:
    with open(path, encoding="utf-8") as fh:
        return load_rules(fh.read(), registry, ontology)


def _candidates(rule: HeuristicRule, sentence: AnnotatedSentence, ontology: Ontology) -> list:
    if rule.extractor == "constant":
        return [rule.value]
    if rule.extractor == "ne":
        hits = [ne.instance for ne in sentence.nes
                if ne.concept in ontology
                and any(ontology.is_a(ne.concept, c) for c in rule.concepts)]
        if rule.mode == "each":
            return list(dict.fromkeys(hits))
        return hits[rule.index:rule.index + 1]
    table = rule.lookup()
    for tok in sentence.tokens:
        tok = tok.lower()
        if tok in table:
            return [table[tok]]
    return []


def fill_arguments(sentence: AnnotatedSentence, predicted_type: str, rules: RuleSet,
                   registry: SchemaRegistry, ontology: Ontology, *,
                   pub_time: int, source: str) -> list:
    """Messages of `predicted_type` read off one sentence.

    Slots no rule can fill stay UNFILLED and the message is partial.
    Messages breaking a schema constraint are dropped.
    """
    if predicted_type == NONE_TYPE or predicted_type is None:
        raise ArgFillError("None sentences carry no message")
    if not rules.has_type(predicted_type):
        raise ArgFillError(f"no argument-filling rules for {predicted_type!r}")
    schema = registry[predicted_type]
    per_slot = []
    for arg in schema.args:
        chosen = [UNFILLED]
        for rule in rules.for_slot(predicted_type, arg.name):
            vals = [v for v in _candidates(rule, sentence, ontology)
                    if check_value(arg, v, ontology) is None]
            if vals:
                chosen = vals
                break
        per_slot.append(chosen)
    time = resolve_time(pub_time, sentence.temporal_offset)
    out = []
    for combo in itertools.product(*per_slot):
        values = dict(zip(schema.slot_names, combo))
        msg = Message.create(predicted_type, values, time, source,
                             sentence.document, (sentence.index,))
        result = validate_message(msg, registry, ontology)
        if not result.ok:
            log.debug("dropping %r: %s", msg, "; ".join(result.violations))
            continue
        out.append(msg)
    return out


def _mergeable(a: Message, b: Message) -> bool:
    if (a.type_name, a.time, a.source, a.document) != (b.type_name, b.time, b.source, b.document):
        return False
    if not (a.partial or b.partial):
        return False
    adds = False
    for (name, va), (_, vb) in zip(a.values, b.values):
        if va is UNFILLED and vb is UNFILLED:
            continue
        if va is UNFILLED or vb is UNFILLED:
            adds = True
        elif va != vb:
            return False
    return adds


def _merge(a: Message, b: Message) -> Message:
    values = {n: (vb if va is UNFILLED else va) for (n, va), (_, vb) in zip(a.values, b.values)}
    sents = tuple(sorted(set(a.provenance[1]) | set(b.provenance[1])))
    return Message.create(a.type_name, values, a.time, a.source, a.document, sents)


def merge_spanning(messages: Sequence[Message]) -> list:
    """Join partial messages of one document that complete each other.

    Two messages merge when they share type, time, source and document, no
    slot filled in both disagrees, and at least one fills a slot the other
    lacks. Merging repeats to a fixpoint, so the function is idempotent.
    """
    work = sorted(messages, key=lambda m: (m.provenance, m.sort_key()))
    changed = True
    while changed:
        changed = False
        for i in range(len(work)):
            for j in range(i + 1, len(work)):
                if _mergeable(work[i], work[j]):
                    work[i] = _merge(work[i], work[j])
                    del work[j]
                    changed = True
                    break
            if changed:
                break
        if changed:
            work.sort(key=lambda m: (m.provenance, m.sort_key()))
    return work
