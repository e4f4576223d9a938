import json
import math

import pytest
from hypothesis import assume, given, settings, strategies as st

from evosum.classifier import (MessageClassifier, SentenceVector, VectorizerConfig,
                               build_vocabulary, classify, cross_validate, register_stemmer,
                               stratified_folds, train_nb, vectorize)
from evosum.corpus import AnnotatedSentence, GoldAnnotation, NESpan
from evosum.errors import ClassifierError
from conftest import load_fixture


def sentence(tokens, label=None, nes=(), index=0):
    gold = (GoldAnnotation.create(label, {}),) if label and label != "None" else ()
    return AnnotatedSentence("d", index, tuple(tokens), tuple(nes), gold)


@pytest.fixture
def nb_fixture():
    fx = load_fixture("nb_fixture.json")
    cfg = VectorizerConfig(min_frequency=fx["min_frequency"])
    sents = [sentence(s["tokens"], s["label"], index=i) for i, s in enumerate(fx["sentences"])]
    vocab = build_vocabulary(sents, cfg)
    vecs = [vectorize(s, vocab, cfg) for s in sents]
    return cfg, vocab, vecs, train_nb(vecs, fx["alpha"])


def test_min_frequency_boundary():
    cfg = VectorizerConfig()
    four = [sentence(["rare"]) for _ in range(4)] + [sentence(["common"]) for _ in range(5)]
    vocab = build_vocabulary(four, cfg)
    assert "W:common" in vocab and "W:rare" not in vocab


def test_ne_types_in_vocabulary():
    s = sentence(["Nalitzis", "played"], nes=[NESpan(0, 1, "Nalitzis", "Player")])
    assert "NE:Player" in build_vocabulary([s], VectorizerConfig(min_frequency=1))
    off = VectorizerConfig(min_frequency=1, include_ne_types=False)
    assert "NE:Player" not in build_vocabulary([s], off)


def test_stopword_sentence_has_no_features():
    cfg = VectorizerConfig(min_frequency=1)
    s = sentence(["the", "of", "and"])
    assert vectorize(s, frozenset({"W:goal"}), cfg).features == ()


def test_vector_labels():
    cfg = VectorizerConfig(min_frequency=1)
    assert vectorize(sentence(["x"], "performance"), frozenset(), cfg).label == "performance"
    assert vectorize(sentence(["x"]), frozenset(), cfg).label == "None"


def test_binary_mode():
    cfg = VectorizerConfig(min_frequency=1, binary=True)
    v = vectorize(sentence(["goal", "goal"]), frozenset({"W:goal"}), cfg)
    assert v.counts == {"W:goal": 1}


def test_stemmer_hook():
    register_stemmer("strip_s", lambda t: t.rstrip("s"))
    cfg = VectorizerConfig(min_frequency=1, use_stemming=True, stemmer="strip_s")
    vocab = build_vocabulary([sentence(["goals"]), sentence(["goal"])], cfg)
    assert vocab == {"W:goal"}
    with pytest.raises(ClassifierError):
        build_vocabulary([sentence(["a"])], VectorizerConfig(use_stemming=True, stemmer="nope"))


def test_hand_computed_posterior(nb_fixture):
    # c1 saw goal x3, c2 saw card x4; vocabulary size 2, alpha 1:
    # P(goal|c1) = 4/5, P(goal|c2) = 1/6, equal priors -> P(c1|goal) = 24/29
    cfg, vocab, _, model = nb_fixture
    assert model.likelihoods["c1"]["W:goal"] == pytest.approx(4 / 5)
    assert model.likelihoods["c2"]["W:goal"] == pytest.approx(1 / 6)
    pred = classify(model, vectorize(sentence(["goal"]), vocab, cfg))
    assert pred.label == "c1"
    assert math.exp(pred.scores["c1"]) == pytest.approx(24 / 29, abs=1e-12)
    assert math.exp(pred.scores["c2"]) == pytest.approx(5 / 29, abs=1e-12)


def test_common_feature_keeps_decisions(nb_fixture):
    cfg, vocab, vecs, model = nb_fixture
    before = [classify(model, v).label for v in vecs]
    for extra in (1, 3, 10):
        padded = [SentenceVector.from_counts({**v.counts, "W:match": extra}, v.label) for v in vecs]
        m2 = train_nb(padded, 1.0)
        assert [classify(m2, v).label for v in vecs] == before


def test_single_label_training():
    vecs = [SentenceVector.from_counts({"W:a": 1}, "only")]
    m = train_nb(vecs)
    assert classify(m, SentenceVector.from_counts({"W:zzz": 4})).label == "only"


def test_empty_vector_uses_priors():
    vecs = [SentenceVector.from_counts({"W:a": 1}, "x"),
            SentenceVector.from_counts({"W:b": 1}, "y"),
            SentenceVector.from_counts({"W:b": 2}, "y")]
    assert classify(train_nb(vecs), SentenceVector(())).label == "y"


def test_tie_breaks_to_smallest_label():
    vecs = [SentenceVector.from_counts({"W:a": 1}, "zeta"),
            SentenceVector.from_counts({"W:a": 1}, "alpha")]
    assert classify(train_nb(vecs), SentenceVector.from_counts({"W:a": 1})).label == "alpha"


def test_alpha_zero_unseen_feature():
    vecs = [SentenceVector.from_counts({"W:a": 1}, "x"),
            SentenceVector.from_counts({"W:b": 1}, "y"),
            SentenceVector.from_counts({"W:b": 1}, "y")]
    m = train_nb(vecs, alpha=0)
    # each class has a zero likelihood for one of the two features: fall back to priors
    p = classify(m, SentenceVector.from_counts({"W:a": 1, "W:b": 1}))
    assert p.label == "y"
    assert classify(m, SentenceVector.from_counts({"W:a": 1})).label == "x"


def test_unseen_label_gets_zero_prior():
    m = train_nb([SentenceVector.from_counts({"W:a": 1}, "x")], labels=["x", "y"])
    assert m.priors["y"] == 0
    assert classify(m, SentenceVector.from_counts({"W:a": 1})).label == "x"


def test_ten_vectors_ten_folds():
    folds = stratified_folds([str(i % 3) for i in range(10)], 10, seed=1)
    assert sorted(len(f) for f in folds) == [1] * 10


def test_fold_errors():
    with pytest.raises(ClassifierError):
        stratified_folds(["a"] * 5, 10, 0)
    with pytest.raises(ClassifierError):
        stratified_folds(["a"] * 5, 1, 0)


def test_model_serialization_round_trip(noiseless):
    sents = noiseless.corpus.sentences()[:300]
    mc = MessageClassifier().fit(sents)
    again = MessageClassifier.from_dict(json.loads(json.dumps(mc.to_dict())))
    assert [again.predict(s).label for s in sents] == [mc.predict(s).label for s in sents]
    d = mc.to_dict()
    d["config"]["min_frequency"] = 2
    with pytest.raises(ClassifierError):
        MessageClassifier.from_dict(d)


def test_cross_validation_noiseless(noiseless):
    rep = cross_validate(noiseless.corpus.sentences(), 10, seed=3)
    assert rep.mean_accuracy == 100.0 and rep.pooled_accuracy == 100.0
    again = cross_validate(noiseless.corpus.sentences(), 10, seed=3, workers=4)
    assert again.folds == rep.folds and again.fold_accuracies == rep.fold_accuracies


def test_vocabulary_rebuilt_per_fold():
    # "zzz" occurs in one sentence only; a vocabulary built over all data
    # would leak it into that sentence's held-out vector
    from evosum.classifier import NaiveBayes
    seen = []

    class Spy(NaiveBayes):
        def predict(self, vector):
            seen.append(vector)
            return super().predict(vector)

    sents = [sentence(["goal"] * 3, "x", index=i) for i in range(6)]
    sents += [sentence(["card"] * 3, "y", index=6 + i) for i in range(3)]
    sents.append(sentence(["zzz"] * 6 + ["card"], "y", index=9))
    cross_validate(sents, k=2, seed=0, config=VectorizerConfig(min_frequency=5),
                   learner_factory=Spy)
    assert len(seen) == len(sents)
    assert not any("W:zzz" in v.counts for v in seen)


@settings(max_examples=500, deadline=None)
@given(st.lists(st.text("ab", min_size=1, max_size=3), min_size=2, max_size=40),
       st.integers(2, 10), st.integers(0, 10 ** 6))
def test_fold_partition(labels, k, seed):
    assume(len(labels) >= k)
    folds = stratified_folds(labels, k, seed)
    flat = [i for f in folds for i in f]
    assert sorted(flat) == list(range(len(labels)))
    sizes = [len(f) for f in folds]
    assert max(sizes) - min(sizes) <= 1
    assert folds == stratified_folds(labels, k, seed)


_feature = st.sampled_from(["W:a", "W:b", "W:c", "W:d", "NE:Player", "NE:Team"])
_vec = st.builds(lambda c, lab: SentenceVector.from_counts(c, lab),
                 st.dictionaries(_feature, st.integers(1, 4), max_size=4),
                 st.sampled_from(["x", "y", "z"]))


@settings(max_examples=500, deadline=None)
@given(st.lists(_vec, min_size=1, max_size=12),
       st.dictionaries(_feature, st.integers(1, 5), max_size=5),
       st.sampled_from([0.0, 0.5, 1.0, 2.0]))
def test_posterior_normalized(train, probe, alpha):
    m = train_nb(train, alpha)
    p = classify(m, SentenceVector.from_counts(probe))
    total = sum(math.exp(s) for s in p.scores.values())
    assert abs(total - 1.0) <= 1e-9
    best = max(p.scores.values())
    assert p.label == min(lab for lab, s in p.scores.items() if s == best)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.text("abc", min_size=1, max_size=4), max_size=8))
def test_namespaces_disjoint(words):
    nes = [NESpan(0, 1, w, w) for w in words[:1]]
    s = sentence(words or ["x"], nes=nes)
    cfg = VectorizerConfig(min_frequency=1, stopwords=frozenset())
    vocab = build_vocabulary([s], cfg)
    lex = {f for f in vocab if f.startswith("W:")}
    ne = {f for f in vocab if f.startswith("NE:")}
    assert lex.isdisjoint(ne) and lex | ne == vocab
