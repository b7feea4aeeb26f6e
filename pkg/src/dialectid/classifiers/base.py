from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np
import scipy.sparse as sp

from ..arff import MISSING, Dataset
from ..features import SparseVector, rows_to_csr

ALGORITHMS = (
    "zero_r",
    "naive_bayes",
    "naive_bayes_multinomial",
    "smo",
    "c45",
    "ripper",
    "rep_tree",
)

DEFAULT_HYPERPARAMETERS: dict[str, dict[str, Any]] = {
    "zero_r": {},
    "naive_bayes": {"var_floor": 1e-6},
    "naive_bayes_multinomial": {},
    "smo": {"C": 1.0, "tolerance": 1e-3, "gap_tolerance": 1e-7, "max_iter": 1_000_000},
    "c45": {"confidence_factor": 0.25, "min_leaf": 2, "pruned": True},
    "ripper": {"folds": 3, "optimizations": 2, "min_coverage": 2.0},
    "rep_tree": {"prune_fraction": 1 / 3, "min_leaf": 2, "pruned": True},
}

_DOMAINS: dict[str, Callable[[Any], bool]] = {
    "var_floor": lambda v: v > 0,
    "C": lambda v: v > 0,
    "tolerance": lambda v: v > 0,
    "gap_tolerance": lambda v: v > 0,
    "max_iter": lambda v: int(v) >= 1,
    "confidence_factor": lambda v: 0 < v < 1,
    "min_leaf": lambda v: int(v) >= 1,
    "pruned": lambda v: isinstance(v, bool),
    "folds": lambda v: int(v) >= 2,
    "optimizations": lambda v: int(v) >= 0,
    "min_coverage": lambda v: v >= 0,
    "prune_fraction": lambda v: 0 < v < 1,
}


class TrainingError(ValueError):
    pass


@dataclass(frozen=True)
class ClassifierSpec:
    algorithm: str
    hyperparameters: dict = field(default_factory=dict)
    seed: int = 1

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown classifier {self.algorithm!r}; choose from {', '.join(ALGORITHMS)}")
        allowed = DEFAULT_HYPERPARAMETERS[self.algorithm]
        for k, v in self.hyperparameters.items():
            if k not in allowed:
                raise ValueError(f"{self.algorithm} has no hyperparameter {k!r}")
            if not _DOMAINS[k](v):
                raise ValueError(f"hyperparameter {k}={v!r} out of range")

    @property
    def params(self) -> dict:
        return {**DEFAULT_HYPERPARAMETERS[self.algorithm], **self.hyperparameters}

    def to_dict(self) -> dict:
        return {"algorithm": self.algorithm, "hyperparameters": dict(self.hyperparameters), "seed": self.seed}

    @classmethod
    def from_dict(cls, d: dict) -> "ClassifierSpec":
        return cls(d["algorithm"], dict(d.get("hyperparameters", {})), d.get("seed", 1))


class ClassDistribution:
    """Per-class probabilities, ordered like the model's class labels."""

    __slots__ = ("labels", "probabilities")

    def __init__(self, probabilities, labels=None):
        p = np.asarray(probabilities, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("need a non-empty 1-D probability vector")
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
            raise ValueError(f"not a probability distribution: {p}")
        self.probabilities = p
        self.labels = tuple(labels) if labels is not None else None

    def __len__(self):
        return self.probabilities.size

    def __getitem__(self, i):
        return float(self.probabilities[i])

    def argmax(self) -> int:
        # np.argmax returns the first maximum, which is the tie rule
        return int(np.argmax(self.probabilities))

    def label(self):
        k = self.argmax()
        return self.labels[k] if self.labels else k

    def as_dict(self) -> dict:
        return dict(zip(self.labels, self.probabilities.tolist()))

    def __repr__(self):
        return f"ClassDistribution({self.probabilities.tolist()!r})"


@dataclass
class Model:
    spec: ClassifierSpec
    class_labels: tuple[str, ...]
    n_features: int
    payload: Any
    nominal_sizes: dict[int, int] = field(default_factory=dict)

    def predict_proba(self, X) -> np.ndarray:
        X = _as_csr(X, self.n_features)
        return _normalize(self.payload.predict_proba(X))

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "class_labels": list(self.class_labels),
            "n_features": self.n_features,
            "nominal_sizes": {str(k): v for k, v in sorted(self.nominal_sizes.items())},
            "payload": self.payload.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Model":
        from . import PAYLOADS

        spec = ClassifierSpec.from_dict(d["spec"])
        return cls(
            spec,
            tuple(d["class_labels"]),
            d["n_features"],
            PAYLOADS[spec.algorithm].from_dict(d["payload"]),
            {int(k): v for k, v in d.get("nominal_sizes", {}).items()},
        )


def _normalize(P: np.ndarray) -> np.ndarray:
    P = np.clip(np.asarray(P, dtype=float), 0.0, None)
    s = P.sum(axis=1, keepdims=True)
    bad = s[:, 0] <= 0
    if np.any(bad):
        P[bad] = 1.0
        s[bad] = P.shape[1]
    return P / s


def _as_csr(X, width: int) -> sp.csr_matrix:
    if isinstance(X, SparseVector):
        X = [X]
    if isinstance(X, (list, tuple)):
        X = rows_to_csr(X, width)
    X = sp.csr_matrix(X, dtype=float)
    if X.shape[1] != width:
        X = X[:, :width] if X.shape[1] > width else sp.hstack([X, sp.csr_matrix((X.shape[0], width - X.shape[1]))], format="csr")
    return X


def design_matrix(data: Dataset) -> tuple[sp.csr_matrix, np.ndarray, dict[int, int]]:
    """Predictor matrix, class codes and nominal predictor sizes.

    Predictors are all attributes except the class, in order. Nominal cells
    become their value index and missing cells become NaN.
    """
    ci = data.class_index
    attrs = [a for i, a in enumerate(data.attributes) if i != ci]
    for a in attrs:
        if a.is_string:
            raise TrainingError(f"string attribute {a.name!r} must be vectorized first")
    nominal = {j: len(a.values) for j, a in enumerate(attrs) if a.is_nominal}
    codes = [{v: k for k, v in enumerate(a.values)} if a.is_nominal else None for a in attrs]
    class_codes = {v: k for k, v in enumerate(data.class_labels)}

    indptr = [0]
    indices: list[int] = []
    values: list[float] = []
    y = np.empty(len(data), dtype=np.int64)
    for r, inst in enumerate(data.instances):
        label = inst[ci]
        if label is MISSING:
            raise TrainingError(f"instance {r} has a missing class value")
        y[r] = class_codes[label]
        for i, v in inst.explicit_items():
            if i == ci:
                continue
            j = i if i < ci else i - 1
            if v is MISSING:
                x = math.nan
            elif codes[j] is not None:
                x = float(codes[j][v])
            else:
                x = float(v)
            if x != 0:
                indices.append(j)
                values.append(x)
        indptr.append(len(indices))
    X = sp.csr_matrix(
        (np.asarray(values, dtype=float), np.asarray(indices, dtype=np.int64), np.asarray(indptr, dtype=np.int64)),
        shape=(len(data), len(attrs)),
    )
    X.sort_indices()
    return X, y, nominal


def instance_vector(data: Dataset, index: int) -> SparseVector:
    """One row of ``data`` as a SparseVector over its predictors."""
    X, _, _ = design_matrix(data.subset([index]))
    row = X.getrow(0)
    return SparseVector(row.indices, row.data)


def require_no_missing(X: sp.csr_matrix, algorithm: str) -> None:
    if np.isnan(X.data).any():
        raise TrainingError(f"{algorithm} does not accept missing values")


def require_numeric(nominal: dict, algorithm: str) -> None:
    if nominal:
        raise TrainingError(f"{algorithm} needs numeric predictors; got nominal ones")


def log_normalize(scores: np.ndarray) -> np.ndarray:
    """Row-wise exp-normalize of log scores (log-sum-exp)."""
    m = scores.max(axis=1, keepdims=True)
    e = np.exp(scores - m)
    return e / e.sum(axis=1, keepdims=True)
