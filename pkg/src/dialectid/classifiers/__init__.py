"""The seven classifiers behind one ``train`` / ``predict`` interface."""

from __future__ import annotations

import numpy as np

from ..arff import Dataset
from ..features import SparseVector
from .base import (
    ALGORITHMS,
    DEFAULT_HYPERPARAMETERS,
    ClassDistribution,
    ClassifierSpec,
    Model,
    TrainingError,
    design_matrix,
    instance_vector,
)
from .bayes import (
    GaussianNBPayload,
    MultinomialNBPayload,
    ZeroRPayload,
    train_multinomial_nb,
    train_naive_bayes,
    train_zero_r,
)
from .ripper import RipperPayload, foil_gain, train_ripper
from .smo import ConvergenceError, SMOPayload, smo_solve_binary, train_smo
from .trees import TreePayload, train_c45, train_rep_tree

TRAINERS = {
    "zero_r": train_zero_r,
    "naive_bayes": train_naive_bayes,
    "naive_bayes_multinomial": train_multinomial_nb,
    "smo": train_smo,
    "c45": train_c45,
    "ripper": train_ripper,
    "rep_tree": train_rep_tree,
}

PAYLOADS = {
    "zero_r": ZeroRPayload,
    "naive_bayes": GaussianNBPayload,
    "naive_bayes_multinomial": MultinomialNBPayload,
    "smo": SMOPayload,
    "c45": TreePayload,
    "ripper": RipperPayload,
    "rep_tree": TreePayload,
}


def train(spec: ClassifierSpec | str, data: Dataset) -> Model:
    """Fit ``spec`` on a numeric dataset with a nominal class."""
    if isinstance(spec, str):
        spec = ClassifierSpec(spec)
    if len(data) == 0:
        raise TrainingError("cannot train on a dataset with no instances")
    cls_attr = data.class_attribute
    if not cls_attr.is_nominal or len(cls_attr.values) < 2:
        raise TrainingError("the class attribute must be nominal with at least two values")
    X, y, nominal = design_matrix(data)
    return fit_matrix(spec, X, y, data.class_labels, nominal)


def fit_matrix(spec: ClassifierSpec, X, y, class_labels, nominal=None) -> Model:
    """Fit on an already built predictor matrix and class-code vector."""
    nominal = dict(nominal or {})
    K = len(class_labels)
    rng = np.random.default_rng(spec.seed)
    trainer = TRAINERS[spec.algorithm]
    if spec.algorithm == "zero_r":
        payload = trainer(X, y, K)
    else:
        payload = trainer(X, y, K, spec.params, rng, nominal)
    return Model(spec, tuple(class_labels), X.shape[1], payload, nominal)


def predict_distribution(model: Model, x: SparseVector) -> ClassDistribution:
    return ClassDistribution(model.predict_proba(x)[0], model.class_labels)


def predict_class(model: Model, x: SparseVector):
    return predict_distribution(model, x).label()


__all__ = [
    "ALGORITHMS",
    "DEFAULT_HYPERPARAMETERS",
    "PAYLOADS",
    "ClassDistribution",
    "ClassifierSpec",
    "ConvergenceError",
    "Model",
    "TrainingError",
    "design_matrix",
    "fit_matrix",
    "foil_gain",
    "instance_vector",
    "predict_class",
    "predict_distribution",
    "smo_solve_binary",
    "train",
]
