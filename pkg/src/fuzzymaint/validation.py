"""Compare refactoring flags against evaluator labels.

LOW is the positive class: a service is a true positive when the evaluators'
majority says L and the model flags it.
"""

from __future__ import annotations

import math
import statistics
import warnings
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import KeyMismatch, TiedDecision, UndefinedMetric
from .model import AssessmentResult

LABEL_ORDER = ("H", "M", "L")


def majority_decision(labels: Iterable[str]) -> str:
    labels = list(labels)
    if not labels:
        raise TiedDecision("no labels to decide from")
    counts = Counter(labels).most_common()
    if len(counts) > 1 and counts[0][1] == counts[1][1]:
        tied = sorted(lab for lab, n in counts if n == counts[0][1])
        raise TiedDecision(f"no majority among {labels}: {', '.join(tied)} tie")
    return counts[0][0]


def decisions(labels: Mapping[str, Iterable[str]]) -> dict[str, str]:
    out = {}
    for service, row in labels.items():
        try:
            out[service] = majority_decision(row)
        except TiedDecision as exc:
            raise TiedDecision(f"service {service!r}: {exc}") from None
    return out


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


def _check_keys(a: Mapping, b: Mapping) -> None:
    if set(a) != set(b):
        only_a = sorted(set(a) - set(b))
        only_b = sorted(set(b) - set(a))
        raise KeyMismatch(f"service sets differ; predictions only: {only_a}, labels only: {only_b}")


def confusion_low(predicted: Mapping[str, bool], decided: Mapping[str, str]) -> ConfusionMatrix:
    _check_keys(predicted, decided)
    tp = fp = fn = tn = 0
    for service, flag in predicted.items():
        low = decided[service] == "L"
        if flag and low:
            tp += 1
        elif flag:
            fp += 1
        elif low:
            fn += 1
        else:
            tn += 1
    return ConfusionMatrix(tp, fp, fn, tn)


@dataclass(frozen=True)
class ClassificationMetrics:
    """Ratios in [0, 1]; ``None`` where the denominator is zero."""

    recall: float | None
    precision: float | None
    f_measure: float | None
    accuracy: float | None

    def undefined(self) -> list[str]:
        return [k for k, v in self.as_dict().items() if v is None]

    def require(self, name: str) -> float:
        value = getattr(self, name)
        if value is None:
            raise UndefinedMetric(f"{name} is undefined (zero denominator)")
        return value

    def as_dict(self) -> dict[str, float | None]:
        return {"recall": self.recall, "precision": self.precision,
                "f_measure": self.f_measure, "accuracy": self.accuracy}


def _ratio(num: int, den: int) -> float | None:
    return num / den if den else None


def classification_metrics(cm: ConfusionMatrix) -> ClassificationMetrics:
    recall = _ratio(cm.tp, cm.tp + cm.fn)
    precision = _ratio(cm.tp, cm.tp + cm.fp)
    if recall is None or precision is None or recall + precision == 0:
        f = None
    else:
        f = 2 * precision * recall / (precision + recall)
    return ClassificationMetrics(recall, precision, f, _ratio(cm.tp + cm.tn, cm.total))


def percent(value: float | None) -> str:
    return "undefined" if value is None else f"{100 * value:.2f}%"


@dataclass(frozen=True)
class LabelStats:
    count: int
    mean: float
    std: float
    population_std: float


def group_stats(results: Iterable[AssessmentResult] | Mapping[str, float],
                decided: Mapping[str, str]) -> dict[str, LabelStats]:
    """Mean and sample standard deviation of maintainability per decided label.

    ``results`` is either assessment results or a plain service -> score map.
    """
    if isinstance(results, Mapping):
        scores = dict(results)
    else:
        scores = {r.service: r.maintainability for r in results}
    _check_keys(scores, decided)
    groups: dict[str, list[float]] = {}
    for service, score in scores.items():
        groups.setdefault(decided[service], []).append(score)

    out = {}
    for label in sorted(groups, key=lambda k: LABEL_ORDER.index(k) if k in LABEL_ORDER else 99):
        xs = groups[label]
        if len(xs) == 1:
            warnings.warn(f"label {label!r} has a single service; its standard deviation is 0",
                          stacklevel=2)
            std = 0.0
        else:
            std = statistics.stdev(xs)
        out[label] = LabelStats(len(xs), math.fsum(xs) / len(xs), std, statistics.pstdev(xs))
    return out
