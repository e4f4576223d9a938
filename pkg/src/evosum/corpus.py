"""Annotated multi-source corpora: documents, sentences, NE spans, gold messages.

On disk a corpus is a manifest plus one JSON file per document::

    manifest.json  {"sources": ["A", "B", "C"], "documents": ["docs/A-r01.json", ...]}
    docs/A-r01.json
        {"id": ..., "source": ..., "pub_time": ...,
         "sentences": [{"index": 0, "tokens": [...],
                        "nes": [{"span": [start, end], "instance": ..., "concept": ...}],
                        "gold": [{"type": ..., "slots": {...}, "temporal_offset": -1}]}]}

``pub_time`` is a round index; ISO calendar dates are accepted and mapped to
rounds 1..n in date order when the corpus is loaded.
"""
from __future__ import annotations

import datetime as _dt
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .errors import CorpusError
from .ontology import Ontology
from .schema import NONE_TYPE, Message, resolve_time


@dataclass(frozen=True)
class NESpan:
    start: int
    end: int  # exclusive token index
    instance: str
    concept: str


@dataclass(frozen=True)
class GoldAnnotation:
    type_name: str
    slots: tuple  # sorted (slot, value) pairs
    temporal_offset: Optional[int] = None

    @classmethod
    def create(cls, type_name, slots: dict, temporal_offset=None):
        return cls(type_name, tuple(sorted(slots.items())), temporal_offset)


@dataclass(frozen=True)
class AnnotatedSentence:
    document: str
    index: int
    tokens: tuple
    nes: tuple = ()
    gold: tuple = ()

    @property
    def label(self) -> str:
        """Gold class of the sentence: its first gold message type, or None."""
        return self.gold[0].type_name if self.gold else NONE_TYPE

    @property
    def temporal_offset(self) -> Optional[int]:
        for g in self.gold:
            if g.temporal_offset is not None:
                return g.temporal_offset
        return None

    def ne_tokens(self, ne: NESpan) -> tuple:
        return self.tokens[ne.start:ne.end]


@dataclass(frozen=True)
class Document:
    id: str
    source: str
    pub_time: int
    sentences: tuple = ()


@dataclass(frozen=True)
class Corpus:
    documents: tuple
    sources: tuple

    def __iter__(self):
        return iter(self.documents)

    def __len__(self):
        return len(self.documents)

    def __getitem__(self, i):
        return self.documents[i]

    def sentences(self) -> list:
        return [s for d in self.documents for s in d.sentences]


def gold_messages(corpus: Iterable[Document]) -> list:
    """Gold messages encoded in the corpus annotations."""
    out = []
    for doc in corpus:
        for s in doc.sentences:
            for g in s.gold:
                out.append(Message.create(
                    g.type_name, dict(g.slots),
                    resolve_time(doc.pub_time, g.temporal_offset),
                    doc.source, doc.id, (s.index,)))
    return out


# -- serialization ---------------------------------------------------------

def document_to_dict(doc: Document) -> dict:
    sentences = []
    for s in doc.sentences:
        gold = []
        for g in s.gold:
            rec = {"type": g.type_name, "slots": dict(g.slots)}
            if g.temporal_offset is not None:
                rec["temporal_offset"] = g.temporal_offset
            gold.append(rec)
        sentences.append({
            "index": s.index,
            "tokens": list(s.tokens),
            "nes": [{"span": [n.start, n.end], "instance": n.instance, "concept": n.concept}
                    for n in s.nes],
            "gold": gold,
        })
    return {"id": doc.id, "source": doc.source, "pub_time": doc.pub_time,
            "sentences": sentences}


def _check_int(v, what):
    if not isinstance(v, int) or isinstance(v, bool):
        raise CorpusError(f"{what} must be an integer, got {v!r}")


def document_from_dict(d: dict, ontology: Optional[Ontology] = None) -> Document:
    try:
        doc_id, source, pub_time = d["id"], d["source"], d["pub_time"]
        raw_sentences = d["sentences"]
    except (KeyError, TypeError) as exc:
        raise CorpusError(f"document record missing field: {exc}") from None
    sentences = []
    for pos, rec in enumerate(raw_sentences):
        if rec.get("index") != pos:
            raise CorpusError(f"{doc_id}: sentence indexes must run 0..n-1 "
                              f"(found {rec.get('index')!r} at position {pos})")
        tokens = tuple(rec.get("tokens", ()))
        nes = []
        for ne in rec.get("nes", ()):
            start, end = ne["span"]
            _check_int(start, f"{doc_id}[{pos}] span start")
            _check_int(end, f"{doc_id}[{pos}] span end")
            if not 0 <= start < end <= len(tokens):
                raise CorpusError(f"{doc_id}[{pos}]: NE span {ne['span']} outside sentence")
            concept = ne["concept"]
            if ontology is not None:
                if concept not in ontology:
                    raise CorpusError(
                        f"{doc_id}[{pos}]: NE concept {concept!r} not in ontology")
                inst = ne["instance"]
                if ontology.has_instance(inst) and not ontology.is_a(
                        ontology.concept_of_instance(inst), concept):
                    raise CorpusError(
                        f"{doc_id}[{pos}]: instance {inst!r} is not a {concept}")
            nes.append(NESpan(start, end, ne["instance"], concept))
        gold = []
        for g in rec.get("gold", ()):
            off = g.get("temporal_offset")
            if off is not None:
                _check_int(off, f"{doc_id}[{pos}] temporal_offset")
            gold.append(GoldAnnotation.create(g["type"], dict(g.get("slots", {})), off))
        sentences.append(AnnotatedSentence(doc_id, pos, tokens, tuple(nes), tuple(gold)))
    return Document(doc_id, source, pub_time, tuple(sentences))


def _map_dates(docs: list) -> list:
    dates = sorted({d.pub_time for d in docs if isinstance(d.pub_time, str)})
    if not dates:
        return docs
    if any(not isinstance(d.pub_time, str) for d in docs):
        raise CorpusError("corpus mixes round indexes and calendar dates")
    for s in dates:
        try:
            _dt.date.fromisoformat(s)
        except ValueError:
            raise CorpusError(f"unparseable publication date {s!r}") from None
    rank = {s: i + 1 for i, s in enumerate(dates)}
    return [Document(d.id, d.source, rank[d.pub_time], d.sentences) for d in docs]


def load_corpus(manifest, ontology: Optional[Ontology] = None) -> Corpus:
    """Load every document listed in a manifest file."""
    manifest = Path(manifest)
    try:
        data = json.loads(manifest.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise CorpusError(f"manifest not found: {manifest}") from None
    except json.JSONDecodeError as exc:
        raise CorpusError(f"{manifest}: invalid JSON: {exc}") from exc
    base = manifest.parent
    docs = []
    for rel in data.get("documents", []):
        path = base / rel
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise CorpusError(f"document file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise CorpusError(f"{path}: invalid JSON: {exc}") from exc
        docs.append(document_from_dict(raw, ontology))
    return make_corpus(docs, data.get("sources"))


def make_corpus(docs: Sequence[Document], sources: Optional[Sequence[str]] = None) -> Corpus:
    docs = _map_dates(list(docs))
    seen = set()
    for d in docs:
        if d.id in seen:
            raise CorpusError(f"duplicate document id {d.id!r}")
        seen.add(d.id)
        if not isinstance(d.pub_time, int) or d.pub_time < 0:
            raise CorpusError(f"{d.id}: pub_time must be a round index >= 0")
    if sources is None:
        sources = list(dict.fromkeys(d.source for d in docs))
    else:
        sources = list(sources)
        unknown = {d.source for d in docs} - set(sources)
        if unknown:
            raise CorpusError(f"documents from sources missing in manifest: {sorted(unknown)}")
    return Corpus(tuple(docs), tuple(sources))


def write_corpus(corpus: Corpus, directory) -> Path:
    """Write manifest.json and docs/<id>.json under `directory`; return the manifest path."""
    directory = Path(directory)
    (directory / "docs").mkdir(parents=True, exist_ok=True)
    rels = []
    for doc in corpus:
        rel = f"docs/{doc.id}.json"
        write_json(directory / rel, document_to_dict(doc))
        rels.append(rel)
    manifest = directory / "manifest.json"
    write_json(manifest, {"sources": list(corpus.sources), "documents": rels})
    return manifest


def write_json(path, obj) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(obj, indent=2, ensure_ascii=False) + "\n"
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)
