"""Precision / recall / F-measure and accuracy scoring against gold annotations."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Optional, Sequence

from .errors import EvaluationError


def f_measure(precision: float, recall: float) -> float:
    """Harmonic mean of precision and recall; 0 when both are 0."""
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


@dataclass(frozen=True)
class PRF:
    precision: float
    recall: float
    f_measure: float
    matched: int = 0
    gold: int = 0
    predicted: int = 0
    # set when P or R had an empty denominator and was defined as 0
    undefined: tuple = ()

    def to_dict(self) -> dict:
        return {"precision": round(self.precision, 4), "recall": round(self.recall, 4),
                "f_measure": round(self.f_measure, 4), "matched": self.matched,
                "gold": self.gold, "predicted": self.predicted,
                "undefined": list(self.undefined)}


def prf(gold: Iterable, predicted: Iterable,
        match_key: Optional[Callable[[object], Hashable]] = None) -> PRF:
    """Score `predicted` against `gold` with one-to-one multiset matching.

    Items are compared through `match_key` (identity by default). Scores are
    percentages. Both sides empty counts as a perfect score.
    """
    key = match_key or (lambda x: x)
    g = Counter(key(x) for x in gold)
    p = Counter(key(x) for x in predicted)
    n_gold, n_pred = sum(g.values()), sum(p.values())
    matched = sum((g & p).values())
    if n_gold == 0 and n_pred == 0:
        return PRF(100.0, 100.0, 100.0)
    undefined = []
    if n_pred:
        precision = 100.0 * matched / n_pred
    else:
        precision = 0.0
        undefined.append("precision")
    if n_gold:
        recall = 100.0 * matched / n_gold
    else:
        recall = 0.0
        undefined.append("recall")
    return PRF(precision, recall, f_measure(precision, recall), matched, n_gold, n_pred,
               tuple(undefined))


def accuracy(gold: Sequence, predicted: Sequence) -> float:
    """Percentage of aligned positions where prediction equals gold."""
    if len(gold) != len(predicted):
        raise EvaluationError(f"length mismatch: {len(gold)} gold vs {len(predicted)} predicted")
    if not gold:
        raise EvaluationError("accuracy of an empty sequence is undefined")
    return 100.0 * sum(a == b for a, b in zip(gold, predicted)) / len(gold)


def message_key(mode: str = "exact") -> Callable:
    if mode == "exact":
        return lambda m: m.key()
    if mode == "type":
        return lambda m: (m.type_name, m.time, m.source)
    raise EvaluationError(f"unknown message matching mode {mode!r}")


def relation_key(r):
    return r.key()


def evaluate_messages(gold, predicted, mode: str = "exact") -> dict:
    """Totals plus a per-type breakdown."""
    key = message_key(mode)
    types = sorted({m.type_name for m in gold} | {m.type_name for m in predicted})
    per_type = {t: prf([m for m in gold if m.type_name == t],
                       [m for m in predicted if m.type_name == t], key).to_dict()
                for t in types}
    return {"mode": mode, "total": prf(gold, predicted, key).to_dict(), "per_type": per_type}


def evaluate_relations(gold, predicted) -> dict:
    names = sorted({(r.axis, r.name) for r in gold} | {(r.axis, r.name) for r in predicted})
    per = {f"{axis}:{name}": prf([r for r in gold if (r.axis, r.name) == (axis, name)],
                                 [r for r in predicted if (r.axis, r.name) == (axis, name)],
                                 relation_key).to_dict()
           for axis, name in names}
    return {"total": prf(gold, predicted, relation_key).to_dict(), "per_relation": per}


def format_report(report: dict) -> str:
    lines = []
    for section, body in report.items():
        if not isinstance(body, dict) or "total" not in body:
            continue
        t = body["total"]
        lines.append(f"{section:<22} P={t['precision']:8.4f}  R={t['recall']:8.4f}  "
                     f"F={t['f_measure']:8.4f}  (gold {t['gold']}, predicted {t['predicted']})")
    if "classification_accuracy" in report:
        lines.append(f"{'classification':<22} accuracy={report['classification_accuracy']:.4f}%")
    return "\n".join(lines) + "\n"
