"""EvaluationReport: the assembled metrics of one evaluation run."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .metrics import ConfusionMatrix, auc, confusion_matrix, f_beta, mae, precision_recall, weighted_average


@dataclass(frozen=True)
class Protocol:
    kind: str  # resubstitution | cv | split | holdout
    k: int | None = None
    pct: float | None = None
    seed: int | None = None
    leaky: bool = False

    def describe(self) -> str:
        if self.kind == "cv":
            s = f"{self.k}-fold cross-validation, seed {self.seed}"
        elif self.kind == "split":
            s = f"{self.pct:g}% train split, seed {self.seed}"
        elif self.kind == "resubstitution":
            s = "training set"
        else:
            s = "supplied test set"
        return s + (" (vocabulary fitted before splitting)" if self.leaky else "")

    def to_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v is not None}

    @classmethod
    def from_dict(cls, d: dict) -> "Protocol":
        return cls(**d)


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    auc: float  # NaN when the class was absent or was the only class evaluated

    def to_dict(self) -> dict:
        return {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in self.__dict__.items()}

    @classmethod
    def from_dict(cls, d: dict) -> "ClassMetrics":
        return cls(*(math.nan if d[k] is None else float(d[k]) for k in ("precision", "recall", "f1", "auc")))


@dataclass(frozen=True)
class EvaluationReport:
    total: int
    correct: int
    incorrect: int
    accuracy: float
    mae: float
    per_class: dict[str, ClassMetrics]
    weighted_avg: ClassMetrics
    confusion: ConfusionMatrix
    protocol: Protocol
    # fitted pipelines per fold/split, kept for inspection; never serialized
    fits: list = field(default_factory=list, compare=False, repr=False)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.per_class)

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "correct": self.correct,
            "incorrect": self.incorrect,
            "accuracy": self.accuracy,
            "mae": self.mae,
            "per_class": {k: v.to_dict() for k, v in self.per_class.items()},
            "weighted_avg": self.weighted_avg.to_dict(),
            "confusion": {"labels": list(self.labels), "counts": self.confusion.counts.tolist()},
            "protocol": self.protocol.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EvaluationReport":
        labels = tuple(d["confusion"]["labels"])
        return cls(
            int(d["total"]),
            int(d["correct"]),
            int(d["incorrect"]),
            float(d["accuracy"]),
            float(d["mae"]),
            {k: ClassMetrics.from_dict(v) for k, v in d["per_class"].items()},
            ClassMetrics.from_dict(d["weighted_avg"]),
            ConfusionMatrix(np.asarray(d["confusion"]["counts"]), labels),
            Protocol.from_dict(d["protocol"]),
        )

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, ensure_ascii=False)

    @classmethod
    def from_json(cls, text: str) -> "EvaluationReport":
        return cls.from_dict(json.loads(text))

    def format(self) -> str:
        return format_report(self)


def _nan_weighted(values, supports) -> float:
    v = np.asarray(values, dtype=float)
    w = np.asarray(supports, dtype=float)
    ok = ~np.isnan(v) & (w > 0)
    if not ok.any():
        return math.nan
    return weighted_average(v[ok], w[ok])


def build_report(
    probabilities: np.ndarray,
    actual: Sequence[int],
    labels: Sequence[str],
    protocol: Protocol,
    fits: list | None = None,
) -> EvaluationReport:
    """Assemble every metric from predicted distributions and true codes.

    The prediction is the first most probable class; the per-class ROC score
    is that class's probability.
    """
    P = np.asarray(probabilities, dtype=float)
    y = np.asarray(actual, dtype=np.int64)
    K = len(labels)
    if P.shape != (y.size, K):
        raise ValueError(f"expected a {y.size}x{K} probability matrix, got {P.shape}")
    if y.size == 0:
        raise ValueError("nothing to evaluate")
    cm = confusion_matrix(y, P.argmax(axis=1), K, labels)
    per_class = {}
    for c, lab in enumerate(labels):
        p, r = precision_recall(cm, c)
        n_pos = int(np.sum(y == c))
        a = auc(P[:, c], y, c) if 0 < n_pos < y.size else math.nan
        per_class[lab] = ClassMetrics(float(p), float(r), f_beta(p, r, 1.0), a)
    sup = cm.supports
    cols = list(zip(*[(m.precision, m.recall, m.f1, m.auc) for m in per_class.values()]))
    wavg = ClassMetrics(
        weighted_average(cols[0], sup),
        weighted_average(cols[1], sup),
        weighted_average(cols[2], sup),
        _nan_weighted(cols[3], sup),
    )
    total, correct = cm.total, cm.correct
    return EvaluationReport(
        total,
        correct,
        total - correct,
        correct / total,
        mae(P, y),
        per_class,
        wavg,
        cm,
        protocol,
        list(fits or []),
    )


def _num(v: float) -> str:
    return "   ?  " if math.isnan(v) else f"{v:.4f}"


def format_report(report: EvaluationReport, title: str | None = None) -> str:
    """Aligned text: summary block, per-class block, confusion matrix."""
    r = report
    out = [f"=== {title or 'Evaluation on ' + r.protocol.describe()} ===", ""]
    out.append(f"Correctly Classified Instances    {r.correct:8d}   {100 * r.accuracy:8.4f} %")
    out.append(f"Incorrectly Classified Instances  {r.incorrect:8d}   {100 * r.incorrect / r.total:8.4f} %")
    out.append(f"Mean absolute error               {r.mae:12.4f}")
    out.append(f"Total Number of Instances         {r.total:8d}")
    out.append("")
    out.append("=== Detailed Accuracy By Class ===")
    out.append("")
    width = max([len("Weighted Avg.")] + [len(k) for k in r.per_class])
    out.append(f"{'Class':<{width}}  Precision  Recall  F-Measure  ROC Area")
    rows = list(r.per_class.items()) + [("Weighted Avg.", r.weighted_avg)]
    for name, m in rows:
        out.append(f"{name:<{width}}  {_num(m.precision):>9}  {_num(m.recall):>6}  {_num(m.f1):>9}  {_num(m.auc):>8}")
    out.append("")
    out.append("=== Confusion Matrix ===")
    out.append("")
    cells = r.confusion.counts
    w = max(4, len(str(cells.max())) + 1, *(len(lab) + 1 for lab in r.labels))
    out.append("".join(f"{lab:>{w}}" for lab in r.labels) + "   <-- classified as")
    for lab, row in zip(r.labels, cells):
        out.append("".join(f"{int(v):>{w}}" for v in row) + f"   | {lab}")
    return "\n".join(out)
