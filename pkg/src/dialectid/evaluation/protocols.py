"""Resubstitution, stratified k-fold cross-validation, percentage split and holdout.

Every protocol fits the vocabulary on the training part only, unless
``leaky=True`` asks for the vocabulary to be fitted once on all the data
before splitting (useful to mimic tools that vectorize first).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np

from ..arff import Dataset
from ..classifiers import ClassifierSpec
from ..features import TokenizerSpec, VectorizerOptions, documents, fit_vocabulary
from ..pipeline import FittedPipeline, fit_on_documents, fit_pipeline
from .report import EvaluationReport, Protocol, build_report


def stratified_folds(codes, k: int, seed: int) -> list[np.ndarray]:
    """Seeded shuffle, stable sort by class, then deal position i to fold i mod k.

    Each class is spread over the folds as evenly as possible, so a fold
    holds floor or ceil of n_c / k instances of class c.
    """
    y = np.asarray(codes)
    if k < 2:
        raise ValueError("need at least 2 folds")
    if k > y.size:
        raise ValueError(f"cannot make {k} folds from {y.size} instances")
    perm = np.random.default_rng(seed).permutation(y.size)
    perm = perm[np.argsort(y[perm], kind="stable")]
    fold_of = np.empty(y.size, dtype=np.int64)
    fold_of[perm] = np.arange(y.size) % k
    return [np.flatnonzero(fold_of == f) for f in range(k)]


def split_sizes(n: int, train_pct: float) -> tuple[int, int]:
    """Train size is n * pct / 100 rounded half up."""
    if not 0 < train_pct < 100:
        raise ValueError("train percentage must lie strictly between 0 and 100")
    n_train = int(Fraction(n) * Fraction(str(train_pct)) / 100 + Fraction(1, 2))
    return n_train, n - n_train


def _predict(fit: FittedPipeline, test: Dataset) -> np.ndarray:
    return fit.predict_proba(documents(test))


def _fit(spec, tokenizer, options, train: Dataset, vocab=None) -> FittedPipeline:
    if vocab is not None:
        return fit_on_documents(spec, vocab, train)
    return fit_pipeline(spec, tokenizer, options, train)


def _codes(data: Dataset) -> np.ndarray:
    return np.asarray(data.class_codes(), dtype=np.int64)


def evaluate_resubstitution(
    spec: ClassifierSpec,
    tokenizer: TokenizerSpec,
    options: VectorizerOptions,
    data: Dataset,
) -> EvaluationReport:
    fit = fit_pipeline(spec, tokenizer, options, data)
    return build_report(_predict(fit, data), _codes(data), data.class_labels, Protocol("resubstitution"), [fit])


def cross_validate(
    spec: ClassifierSpec,
    tokenizer: TokenizerSpec,
    options: VectorizerOptions,
    data: Dataset,
    k: int = 10,
    seed: int = 1,
    leaky: bool = False,
    workers: int = 1,
) -> EvaluationReport:
    """Stratified k-fold CV with all held-out predictions pooled into one report."""
    y = _codes(data)
    folds = stratified_folds(y, k, seed)
    vocab = fit_vocabulary(documents(data), tokenizer, options) if leaky else None

    def run(test_idx):
        train_idx = np.setdiff1d(np.arange(y.size), test_idx)
        fit = _fit(spec, tokenizer, options, data.subset(train_idx), vocab)
        return fit, _predict(fit, data.subset(test_idx))

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, folds))
    else:
        results = [run(f) for f in folds]

    # pooled in fold order, so scheduling cannot change the report
    P = np.zeros((y.size, len(data.class_labels)))
    for idx, (_, probs) in zip(folds, results):
        P[idx] = probs
    order = np.concatenate(folds)
    return build_report(
        P[order], y[order], data.class_labels, Protocol("cv", k=k, seed=seed, leaky=leaky), [f for f, _ in results]
    )


def percentage_split(
    spec: ClassifierSpec,
    tokenizer: TokenizerSpec,
    options: VectorizerOptions,
    data: Dataset,
    train_pct: float = 60,
    seed: int = 1,
    leaky: bool = False,
) -> EvaluationReport:
    n_train, n_test = split_sizes(len(data), train_pct)
    if n_train == 0 or n_test == 0:
        raise ValueError(f"a {train_pct}% split of {len(data)} instances leaves an empty part")
    perm = np.random.default_rng(seed).permutation(len(data))
    train, test = data.subset(perm[:n_train]), data.subset(perm[n_train:])
    vocab = fit_vocabulary(documents(data), tokenizer, options) if leaky else None
    fit = _fit(spec, tokenizer, options, train, vocab)
    protocol = Protocol("split", pct=float(train_pct), seed=seed, leaky=leaky)
    return build_report(_predict(fit, test), _codes(test), data.class_labels, protocol, [fit])


def evaluate_holdout(fit: FittedPipeline, test: Dataset) -> EvaluationReport:
    """Score a fitted pipeline on a separate labelled test set."""
    labels = fit.class_labels
    if set(test.class_labels) != set(labels):
        raise ValueError(
            f"test classes {list(test.class_labels)} do not match training classes {list(labels)}"
        )
    remap = {lab: i for i, lab in enumerate(labels)}
    y = np.asarray([remap[v] for v in test.class_values()], dtype=np.int64)
    return build_report(_predict(fit, test), y, labels, Protocol("holdout"), [fit])
