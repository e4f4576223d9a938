"""Sentence -> message type classification.

Sentences become sparse bag-of-words vectors, optionally extended with the
NE types they mention, and a multinomial naive Bayes model with additive
smoothing assigns a message type (or ``None``).
"""
from __future__ import annotations

import hashlib
import json
import logging
import math
import random
from collections import Counter, defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Mapping, NamedTuple, Optional, Protocol, Sequence

from .corpus import AnnotatedSentence
from .errors import ClassifierError

log = logging.getLogger(__name__)

WORD_PREFIX = "W:"
NE_PREFIX = "NE:"

DEFAULT_STOPWORDS = frozenset("""
a an the of for to in on at by with from and or but as is was were be been being
are it its this that these those he she they we you i his her their our your
has had have do did does can could will would should may might very so than
then there here not no also just about into over after before during while
""".split())

_STEMMERS: dict = {"identity": lambda tok: tok}


def register_stemmer(name: str, fn: Callable[[str], str]) -> None:
    """Make a stemmer selectable by name in :class:`VectorizerConfig`."""
    _STEMMERS[name] = fn


def get_stemmer(name: str) -> Callable[[str], str]:
    try:
        return _STEMMERS[name]
    except KeyError:
        raise ClassifierError(f"unknown stemmer {name!r}") from None


@dataclass(frozen=True)
class VectorizerConfig:
    use_stemming: bool = False
    stemmer: str = "identity"
    include_ne_types: bool = True
    # tokens occurring fewer than this many times corpus-wide are dropped
    min_frequency: int = 5
    stopwords: frozenset = DEFAULT_STOPWORDS
    binary: bool = False
    lowercase: bool = True

    def __post_init__(self):
        if self.min_frequency < 1:
            raise ClassifierError("min_frequency must be >= 1")
        object.__setattr__(self, "stopwords", frozenset(self.stopwords))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["stopwords"] = sorted(self.stopwords)
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "VectorizerConfig":
        d = dict(d)
        if "stopwords" in d:
            d["stopwords"] = frozenset(d["stopwords"])
        return cls(**d)

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def _words(sentence: AnnotatedSentence, config: VectorizerConfig) -> list:
    stem = get_stemmer(config.stemmer) if config.use_stemming else None
    out = []
    for tok in sentence.tokens:
        if config.lowercase:
            tok = tok.lower()
        if tok in config.stopwords:
            continue
        if stem is not None:
            tok = stem(tok)
        out.append(tok)
    return out


def build_vocabulary(sentences: Iterable[AnnotatedSentence], config: VectorizerConfig) -> frozenset:
    sentences = list(sentences)
    if not sentences:
        raise ClassifierError("cannot build a vocabulary from an empty corpus")
    freq = Counter()
    ne_types = set()
    for s in sentences:
        freq.update(_words(s, config))
        if config.include_ne_types:
            ne_types.update(ne.concept for ne in s.nes)
    vocab = {WORD_PREFIX + w for w, n in freq.items() if n >= config.min_frequency}
    vocab.update(NE_PREFIX + c for c in ne_types)
    if not vocab:
        log.warning("vocabulary is empty (min_frequency=%d)", config.min_frequency)
    return frozenset(vocab)


@dataclass(frozen=True)
class SentenceVector:
    features: tuple  # sorted (feature id, count) pairs, counts >= 1
    label: Optional[str] = None

    @property
    def counts(self) -> dict:
        return dict(self.features)

    @classmethod
    def from_counts(cls, counts: Mapping[str, int], label=None) -> "SentenceVector":
        return cls(tuple(sorted((f, c) for f, c in counts.items() if c > 0)), label)


def vectorize(sentence: AnnotatedSentence, vocabulary, config: VectorizerConfig,
              label: Optional[str] = None) -> SentenceVector:
    counts = Counter(WORD_PREFIX + w for w in _words(sentence, config))
    if config.include_ne_types:
        counts.update(NE_PREFIX + ne.concept for ne in sentence.nes)
    counts = {f: c for f, c in counts.items() if f in vocabulary}
    if config.binary:
        counts = {f: 1 for f in counts}
    return SentenceVector.from_counts(counts, sentence.label if label is None else label)


@dataclass(frozen=True)
class NBModel:
    priors: Mapping  # label -> P(label)
    likelihoods: Mapping  # label -> {feature -> P(feature | label)}
    vocabulary: frozenset
    alpha: float = 1.0
    labels: tuple = field(default=())

    @cached_property
    def log_tables(self) -> dict:
        return {lab: {f: _log(p) for f, p in self.likelihoods[lab].items()} for lab in self.labels}

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "labels": list(self.labels),
            "priors": {k: self.priors[k] for k in self.labels},
            "likelihoods": {k: dict(sorted(self.likelihoods[k].items())) for k in self.labels},
            "vocabulary": sorted(self.vocabulary),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "NBModel":
        return cls(dict(d["priors"]), {k: dict(v) for k, v in d["likelihoods"].items()},
                   frozenset(d["vocabulary"]), d["alpha"], tuple(d["labels"]))


def train_nb(vectors: Sequence[SentenceVector], alpha: float = 1.0, *,
             vocabulary: Optional[Iterable[str]] = None,
             labels: Optional[Iterable[str]] = None) -> NBModel:
    """Fit a multinomial naive Bayes model.

    Labels listed in `labels` but absent from the data get prior 0.
    """
    vectors = list(vectors)
    if not vectors:
        raise ClassifierError("cannot train on an empty training set")
    if alpha < 0:
        raise ClassifierError("alpha must be >= 0")
    if vocabulary is None:
        vocabulary = {f for v in vectors for f, _ in v.features}
    vocabulary = frozenset(vocabulary)
    label_counts = Counter(v.label for v in vectors)
    all_labels = sorted(set(label_counts) | set(labels or ()))
    counts: dict = defaultdict(Counter)
    for v in vectors:
        counts[v.label].update({f: c for f, c in v.features if f in vocabulary})

    n = len(vectors)
    priors = {lab: label_counts.get(lab, 0) / n for lab in all_labels}
    likelihoods = {}
    size = len(vocabulary)
    for lab in all_labels:
        c = counts.get(lab, Counter())
        total = sum(c.values())
        denom = total + alpha * size
        if denom == 0:
            table = {f: 1.0 / size for f in vocabulary}
        else:
            table = {f: (c.get(f, 0) + alpha) / denom for f in vocabulary}
        likelihoods[lab] = table
    return NBModel(priors, likelihoods, vocabulary, alpha, tuple(all_labels))


class Prediction(NamedTuple):
    label: str
    scores: dict  # label -> normalized log posterior


def _log(p: float) -> float:
    return math.log(p) if p > 0 else -math.inf


def classify(model: NBModel, vector: SentenceVector) -> Prediction:
    feats = [(f, c) for f, c in vector.features if f in model.vocabulary]
    joint = {}
    for lab in model.labels:
        s = _log(model.priors[lab])
        table = model.log_tables[lab]
        for f, c in feats:
            if s == -math.inf:
                break
            s += c * table[f]
        joint[lab] = s
    if all(s == -math.inf for s in joint.values()):
        # every class saw a zero likelihood (alpha = 0): decide on priors alone
        joint = {lab: _log(model.priors[lab]) for lab in model.labels}
    top = max(joint.values())
    lse = top + math.log(sum(math.exp(s - top) for s in joint.values() if s > -math.inf))
    scores = {lab: s - lse for lab, s in joint.items()}
    label = min(lab for lab, s in joint.items() if s == top)
    return Prediction(label, scores)


class Classifier(Protocol):
    """Interface for pluggable learners (boosting or SVM learners fit here)."""

    def fit(self, vectors: Sequence[SentenceVector], labels: Sequence[str] = ()) -> "Classifier": ...

    def predict(self, vector: SentenceVector) -> Prediction: ...


class NaiveBayes:
    def __init__(self, alpha: float = 1.0):
        self.alpha = alpha
        self.model: Optional[NBModel] = None

    def fit(self, vectors, labels=()):
        self.model = train_nb(vectors, self.alpha, labels=labels)
        return self

    def predict(self, vector):
        if self.model is None:
            raise ClassifierError("classifier is not trained")
        return classify(self.model, vector)


class MessageClassifier:
    """Vectorizer and learner bundled together: raw sentences in, types out."""

    def __init__(self, config: VectorizerConfig = VectorizerConfig(), alpha: float = 1.0,
                 learner_factory: Optional[Callable[[], Classifier]] = None):
        self.config = config
        self.alpha = alpha
        self._factory = learner_factory or (lambda: NaiveBayes(alpha))
        self.vocabulary: frozenset = frozenset()
        self.learner: Optional[Classifier] = None

    def fit(self, sentences: Sequence[AnnotatedSentence],
            labels: Optional[Sequence[str]] = None, all_labels: Iterable[str] = ()):
        sentences = list(sentences)
        labels = [s.label for s in sentences] if labels is None else list(labels)
        self.vocabulary = build_vocabulary(sentences, self.config)
        vecs = [vectorize(s, self.vocabulary, self.config, lab) for s, lab in zip(sentences, labels)]
        self.learner = self._factory().fit(vecs, tuple(all_labels))
        return self

    def predict(self, sentence: AnnotatedSentence) -> Prediction:
        if self.learner is None:
            raise ClassifierError("classifier is not trained")
        return self.learner.predict(vectorize(sentence, self.vocabulary, self.config))

    def to_dict(self) -> dict:
        model = getattr(self.learner, "model", None)
        if not isinstance(model, NBModel):
            raise ClassifierError("only naive Bayes models can be serialized")
        return {"config": self.config.to_dict(), "config_hash": self.config.digest(),
                "model": model.to_dict()}

    @classmethod
    def from_dict(cls, d: Mapping) -> "MessageClassifier":
        config = VectorizerConfig.from_dict(d["config"])
        if d.get("config_hash") not in (None, config.digest()):
            raise ClassifierError("model file config hash does not match its config")
        model = NBModel.from_dict(d["model"])
        mc = cls(config, model.alpha)
        mc.vocabulary = model.vocabulary
        nb = NaiveBayes(model.alpha)
        nb.model = model
        mc.learner = nb
        return mc


# -- cross-validation ------------------------------------------------------

def stratified_folds(labels: Sequence[str], k: int, seed) -> tuple:
    """Seeded stratified partition of indexes into `k` folds.

    Each label's indexes are shuffled and dealt round-robin; the dealing
    position carries over between labels so fold sizes differ by at most one.
    """
    if k < 2:
        raise ClassifierError("need at least 2 folds")
    if len(labels) < k:
        raise ClassifierError(f"{len(labels)} items cannot fill {k} folds")
    rng = random.Random(seed)
    by_label = defaultdict(list)
    for i, lab in enumerate(labels):
        by_label[lab].append(i)
    folds = [[] for _ in range(k)]
    pos = 0
    for lab in sorted(by_label):
        idx = by_label[lab]
        rng.shuffle(idx)
        for i in idx:
            folds[pos % k].append(i)
            pos += 1
    return tuple(tuple(sorted(f)) for f in folds)


@dataclass(frozen=True)
class CVReport:
    folds: tuple
    fold_accuracies: tuple
    mean_accuracy: float
    # WEKA-style "correctly classified instances" over all folds together
    pooled_accuracy: float
    predictions: tuple

    def to_dict(self) -> dict:
        return {
            "folds": [{"fold": i, "size": len(f), "accuracy": round(a, 4)}
                      for i, (f, a) in enumerate(zip(self.folds, self.fold_accuracies))],
            "mean_accuracy": round(self.mean_accuracy, 4),
            "pooled_accuracy": round(self.pooled_accuracy, 4),
        }


def cross_validate(sentences: Sequence[AnnotatedSentence], k: int = 10, seed=0, *,
                   config: VectorizerConfig = VectorizerConfig(), alpha: float = 1.0,
                   labels: Optional[Sequence[str]] = None,
                   learner_factory=None, workers: int = 1) -> CVReport:
    """k-fold cross-validation; the vocabulary is rebuilt on every training split."""
    sentences = list(sentences)
    labels = [s.label for s in sentences] if labels is None else list(labels)
    folds = stratified_folds(labels, k, seed)
    label_set = sorted(set(labels))

    def run_fold(test_idx):
        test = set(test_idx)
        train = [i for i in range(len(sentences)) if i not in test]
        mc = MessageClassifier(config, alpha, learner_factory)
        mc.fit([sentences[i] for i in train], [labels[i] for i in train], label_set)
        return [mc.predict(sentences[i]).label for i in test_idx]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            fold_preds = list(pool.map(run_fold, folds))
    else:
        fold_preds = [run_fold(f) for f in folds]

    predictions = [None] * len(sentences)
    accs = []
    for idx, preds in zip(folds, fold_preds):
        hits = 0
        for i, p in zip(idx, preds):
            predictions[i] = p
            hits += p == labels[i]
        accs.append(100.0 * hits / len(idx))
    pooled = 100.0 * sum(p == g for p, g in zip(predictions, labels)) / len(labels)
    return CVReport(folds, tuple(accs), sum(accs) / len(accs), pooled, tuple(predictions))
