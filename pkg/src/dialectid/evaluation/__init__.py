"""Metrics, evaluation reports and validation protocols."""

from .metrics import (
    ConfusionMatrix,
    RocPoint,
    auc,
    confusion_matrix,
    f_beta,
    mae,
    precision_recall,
    roc_curve,
    weighted_average,
)
from .protocols import (
    cross_validate,
    evaluate_holdout,
    evaluate_resubstitution,
    percentage_split,
    split_sizes,
    stratified_folds,
)
from .report import ClassMetrics, EvaluationReport, Protocol, build_report, format_report

__all__ = [
    "ClassMetrics",
    "ConfusionMatrix",
    "EvaluationReport",
    "Protocol",
    "RocPoint",
    "auc",
    "build_report",
    "confusion_matrix",
    "cross_validate",
    "evaluate_holdout",
    "evaluate_resubstitution",
    "f_beta",
    "format_report",
    "mae",
    "percentage_split",
    "precision_recall",
    "roc_curve",
    "split_sizes",
    "stratified_folds",
    "weighted_average",
]
