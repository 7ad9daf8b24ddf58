"""Imbalanced-classification metrics for attribute inspection outcomes.

Convention throughout: a defect is the positive class and a model
"reject" verdict is a positive prediction. Metrics whose denominator is
empty are reported as None (not computable) instead of being coerced to
0 or 1 — a validation record must not fabricate values — and the gap
propagates to anything derived from them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import DomainError

TRUTH_LABELS = ("defect", "good")
VERDICT_LABELS = ("reject", "accept")


@dataclass(frozen=True)
class ConfusionMatrix:
    """Outcome counts: tp/fn split the defects, fp/tn split the good units."""

    tp: int = 0
    fn: int = 0
    fp: int = 0
    tn: int = 0

    def __post_init__(self):
        if min(self.tp, self.fn, self.fp, self.tn) < 0:
            raise DomainError("confusion matrix counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fn + self.fp + self.tn

    def to_json_dict(self) -> dict:
        return {"tp": self.tp, "fn": self.fn, "fp": self.fp, "tn": self.tn}

    @classmethod
    def from_json_dict(cls, doc: dict) -> "ConfusionMatrix":
        return cls(tp=doc["tp"], fn=doc["fn"], fp=doc["fp"], tn=doc["tn"])


@dataclass(frozen=True)
class MetricsReport:
    """Per-class rates; None marks a metric whose denominator was empty."""

    balanced_accuracy: Optional[float]
    precision: Optional[float]
    recall: Optional[float]
    specificity: Optional[float]
    escape_rate: Optional[float]
    overkill_rate: Optional[float]

    def to_json_dict(self) -> dict:
        return {
            "balanced_accuracy": self.balanced_accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "specificity": self.specificity,
            "escape_rate": self.escape_rate,
            "overkill_rate": self.overkill_rate,
        }


def from_pairs(truth: Iterable[str], predicted: Iterable[str]) -> ConfusionMatrix:
    """Count (truth, predicted) pairs into a confusion matrix.

    truth labels are "defect"/"good"; predictions are "reject"/"accept".
    """
    truth = list(truth)
    predicted = list(predicted)
    if len(truth) != len(predicted):
        raise DomainError(
            f"truth and predicted lengths differ: {len(truth)} vs {len(predicted)}"
        )
    if not truth:
        raise DomainError("at least one (truth, predicted) pair is required")

    tp = fn = fp = tn = 0
    for t, p in zip(truth, predicted):
        if t not in TRUTH_LABELS:
            raise DomainError(f"unknown truth label {t!r}")
        if p not in VERDICT_LABELS:
            raise DomainError(f"unknown verdict label {p!r}")
        if t == "defect":
            if p == "reject":
                tp += 1
            else:
                fn += 1
        else:
            if p == "reject":
                fp += 1
            else:
                tn += 1
    return ConfusionMatrix(tp=tp, fn=fn, fp=fp, tn=tn)


def _ratio(num: int, den: int) -> Optional[float]:
    return num / den if den > 0 else None


def report(cm: ConfusionMatrix) -> MetricsReport:
    """Compute the inspection metrics set from a confusion matrix."""
    if cm.total < 1:
        raise DomainError("cannot report metrics on an all-zero matrix")

    recall = _ratio(cm.tp, cm.tp + cm.fn)
    precision = _ratio(cm.tp, cm.tp + cm.fp)
    specificity = _ratio(cm.tn, cm.tn + cm.fp)
    escape_rate = _ratio(cm.fn, cm.tp + cm.fn)
    overkill_rate = _ratio(cm.fp, cm.fp + cm.tn)
    balanced_accuracy = (
        (recall + specificity) / 2.0
        if recall is not None and specificity is not None
        else None
    )
    return MetricsReport(
        balanced_accuracy=balanced_accuracy,
        precision=precision,
        recall=recall,
        specificity=specificity,
        escape_rate=escape_rate,
        overkill_rate=overkill_rate,
    )
