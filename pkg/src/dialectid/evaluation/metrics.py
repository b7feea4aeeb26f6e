"""Classification metrics: confusion matrix, precision/recall/F, MAE, ROC and AUC."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class ConfusionMatrix:
    """Rows are actual classes, columns predicted classes."""

    counts: np.ndarray
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ValueError("confusion counts must be a square matrix")
        if np.any(c < 0):
            raise ValueError("confusion counts must be non-negative")
        object.__setattr__(self, "counts", c)
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def n_classes(self) -> int:
        return self.counts.shape[0]

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def correct(self) -> int:
        return int(np.trace(self.counts))

    @property
    def supports(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(self.counts + other.counts, self.labels)

    def __eq__(self, other):
        return isinstance(other, ConfusionMatrix) and np.array_equal(self.counts, other.counts)

    def __hash__(self):
        return hash(self.counts.tobytes())


@dataclass(frozen=True)
class RocPoint:
    fpr: float
    tpr: float


def confusion_matrix(actual: Sequence[int], predicted: Sequence[int], n_classes: int, labels=None) -> ConfusionMatrix:
    a = np.asarray(actual, dtype=np.int64).ravel()
    p = np.asarray(predicted, dtype=np.int64).ravel()
    if a.size != p.size:
        raise ValueError(f"{a.size} actual labels but {p.size} predictions")
    for name, v in (("actual", a), ("predicted", p)):
        if v.size and (v.min() < 0 or v.max() >= n_classes):
            raise ValueError(f"{name} label outside 0..{n_classes - 1}")
    counts = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(counts, (a, p), 1)
    return ConfusionMatrix(counts, labels)


def precision_recall(cm: ConfusionMatrix, c: int) -> tuple[float, float]:
    """Precision and recall of class ``c``; 0 when a denominator is 0."""
    tp = cm.counts[c, c]
    col = cm.counts[:, c].sum()
    row = cm.counts[c, :].sum()
    return (tp / col if col else 0.0), (tp / row if row else 0.0)


def f_beta(p: float, r: float, beta: float = 1.0) -> float:
    if beta <= 0:
        raise ValueError("beta must be positive")
    b2 = beta * beta
    den = b2 * p + r
    return (b2 + 1) * p * r / den if den > 0 else 0.0


def weighted_average(values: Sequence[float], supports: Sequence[float]) -> float:
    v = np.asarray(values, dtype=float)
    w = np.asarray(supports, dtype=float)
    if v.shape != w.shape:
        raise ValueError("values and supports differ in length")
    total = w.sum()
    if total <= 0:
        raise ValueError("zero total support")
    return float(np.dot(w, v) / total)


def mae(distributions, actual: Sequence[int]) -> float:
    """Mean over instances and classes of |p(c) - [c == actual]|."""
    P = np.asarray([np.asarray(getattr(d, "probabilities", d), dtype=float) for d in distributions])
    a = np.asarray(actual, dtype=np.int64)
    if P.shape[0] != a.size:
        raise ValueError("distributions and labels differ in length")
    if a.size == 0:
        return 0.0
    target = np.zeros_like(P)
    target[np.arange(a.size), a] = 1.0
    return float(np.abs(P - target).sum() / P.size)


def _pos_neg(scores, actual, c):
    s = np.asarray(scores, dtype=float)
    pos = np.asarray(actual) == c
    if s.shape != pos.shape:
        raise ValueError("scores and labels differ in length")
    n_pos = int(pos.sum())
    if n_pos == 0 or n_pos == pos.size:
        raise ValueError("ROC needs at least one positive and one negative instance")
    return s, pos


def roc_curve(scores: Sequence[float], actual: Sequence[int], c: int) -> list[RocPoint]:
    """One-vs-rest ROC points from a descending threshold sweep.

    Instances sharing a score enter together, so ties produce one
    diagonal segment.
    """
    s, pos = _pos_neg(scores, actual, c)
    order = np.argsort(-s, kind="stable")
    s, pos = s[order], pos[order]
    last = np.r_[s[1:] != s[:-1], True]
    tp = np.cumsum(pos)[last]
    fp = np.cumsum(~pos)[last]
    n_pos, n_neg = tp[-1], fp[-1]
    pts = [RocPoint(0.0, 0.0)]
    pts += [RocPoint(f / n_neg, t / n_pos) for f, t in zip(fp.tolist(), tp.tolist())]
    return pts


def auc(scores: Sequence[float], actual: Sequence[int], c: int) -> float:
    """Trapezoidal area under ``roc_curve``."""
    pts = roc_curve(scores, actual, c)
    area = 0.0
    for a, b in zip(pts, pts[1:]):
        area += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2
    return area
