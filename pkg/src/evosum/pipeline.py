"""End-to-end wiring: classify, fill, merge, grid, relate, evaluate."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

from .argfill import fill_arguments, merge_spanning
from .classifier import MessageClassifier, VectorizerConfig
from .corpus import Corpus, gold_messages
from .evaluation import accuracy, evaluate_messages, evaluate_relations
from .grid import Grid, build_grid
from .pack import DomainPack
from .relations import RelationConfig, brute_force_relations, extract_relations
from .schema import NONE_TYPE

log = logging.getLogger(__name__)


def train_classifier(corpus: Corpus, pack: DomainPack,
                     config: VectorizerConfig = VectorizerConfig(),
                     alpha: float = 1.0) -> MessageClassifier:
    sentences = corpus.sentences()
    labels = list(pack.registry)  # every declared type, None included
    return MessageClassifier(config, alpha).fit(sentences, all_labels=labels)


def extract_messages(corpus: Corpus, classifier: MessageClassifier, pack: DomainPack):
    """Classify every sentence and fill arguments; returns (messages, predicted labels)."""
    messages, predicted = [], []
    for doc in corpus:
        doc_msgs = []
        for s in doc.sentences:
            label = classifier.predict(s).label
            predicted.append(label)
            if label == NONE_TYPE:
                continue
            doc_msgs.extend(fill_arguments(s, label, pack.rules, pack.registry, pack.ontology,
                                           pub_time=doc.pub_time, source=doc.source))
        messages.extend(merge_spanning(doc_msgs))
    return messages, predicted


@dataclass
class PipelineResult:
    classifier: MessageClassifier
    messages: list
    grid: Grid
    relations: list
    gold_messages: list
    gold_relations: list
    report: dict


def run_pipeline(corpus: Corpus, pack: DomainPack,
                 vectorizer: VectorizerConfig = VectorizerConfig(),
                 relation_config: RelationConfig = RelationConfig(),
                 alpha: float = 1.0, include_partial: bool = False,
                 workers: int = 1, classifier: Optional[MessageClassifier] = None) -> PipelineResult:
    """Train on the corpus annotations (unless a classifier is given), extract,
    relate and score against the gold annotations."""
    if classifier is None:
        classifier = train_classifier(corpus, pack, vectorizer, alpha)
    messages, predicted = extract_messages(corpus, classifier, pack)
    grid = build_grid(messages, corpus.sources, include_partial=include_partial)
    rels = extract_relations(grid, pack.relations, relation_config, pack.ontology, workers)
    gold = gold_messages(corpus)
    gold_rels = brute_force_relations(gold, pack.relations, relation_config, pack.ontology,
                                      corpus.sources)
    report = score(corpus, predicted, messages, grid, rels, gold, gold_rels)
    return PipelineResult(classifier, messages, grid, rels, gold, gold_rels, report)


def score(corpus, predicted, messages, grid, rels, gold, gold_rels) -> dict:
    placed = list(grid.messages())
    report = {
        "messages_type_only": evaluate_messages(gold, placed, "type"),
        "messages_exact": evaluate_messages(gold, placed, "exact"),
        "relations": evaluate_relations(gold_rels, rels),
        "partial_messages": sum(m.partial for m in messages),
    }
    gold_labels = [s.label for s in corpus.sentences()]
    if predicted and len(predicted) == len(gold_labels):
        report["classification_accuracy"] = round(accuracy(gold_labels, predicted), 4)
    return report
