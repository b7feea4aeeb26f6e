"""Majority-class baseline and the two naive Bayes variants."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import log_normalize, require_no_missing, require_numeric, TrainingError

_LOG_2PI = np.log(2 * np.pi)


@dataclass
class ZeroRPayload:
    counts: np.ndarray

    def predict_proba(self, X):
        p = self.counts / self.counts.sum()
        return np.tile(p, (X.shape[0], 1))

    def to_dict(self):
        return {"counts": self.counts.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(np.asarray(d["counts"], dtype=float))


def train_zero_r(X, y, n_classes, params=None, rng=None) -> ZeroRPayload:
    if len(y) == 0:
        raise TrainingError("zero_r needs at least one instance")
    return ZeroRPayload(np.bincount(y, minlength=n_classes).astype(float))


@dataclass
class GaussianNBPayload:
    log_prior: np.ndarray  # (K,)
    means: np.ndarray  # (K, p)
    variances: np.ndarray  # (K, p)
    present: np.ndarray  # (K,) bool, False for classes without training data

    def predict_proba(self, X):
        K = self.log_prior.size
        scores = np.tile(self.log_prior, (X.shape[0], 1))
        Xd = X.toarray()
        for k in range(K):
            if not self.present[k]:
                continue
            m, v = self.means[k], self.variances[k]
            ll = -0.5 * (_LOG_2PI + np.log(v)) - (Xd - m) ** 2 / (2 * v)
            scores[:, k] += ll.sum(axis=1)
        return log_normalize(scores)

    def to_dict(self):
        return {
            "log_prior": self.log_prior.tolist(),
            "means": self.means.tolist(),
            "variances": self.variances.tolist(),
            "present": self.present.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        p = len(d["means"][0]) if d["means"] else 0
        K = len(d["log_prior"])
        return cls(
            np.asarray(d["log_prior"], dtype=float),
            np.asarray(d["means"], dtype=float).reshape(K, p),
            np.asarray(d["variances"], dtype=float).reshape(K, p),
            np.asarray(d["present"], dtype=bool),
        )


def train_naive_bayes(X, y, n_classes, params=None, rng=None, nominal=None) -> GaussianNBPayload:
    """Gaussian naive Bayes with Laplace-smoothed priors.

    A class with no training instances keeps its prior and contributes no
    density term (a flat likelihood).
    """
    params = params or {}
    require_no_missing(X, "naive_bayes")
    require_numeric(nominal or {}, "naive_bayes")
    floor = params.get("var_floor", 1e-6)
    n, p = X.shape
    counts = np.bincount(y, minlength=n_classes).astype(float)
    log_prior = np.log((counts + 1) / (n + n_classes))
    means = np.zeros((n_classes, p))
    variances = np.ones((n_classes, p))
    for k in range(n_classes):
        rows = X[y == k]
        if rows.shape[0] == 0:
            continue
        m = np.asarray(rows.mean(axis=0)).ravel()
        sq = np.asarray(rows.multiply(rows).mean(axis=0)).ravel()
        means[k] = m
        variances[k] = np.maximum(sq - m * m, floor)
    return GaussianNBPayload(log_prior, means, variances, counts > 0)


@dataclass
class MultinomialNBPayload:
    log_prior: np.ndarray  # (K,)
    log_cond: np.ndarray  # (K, V)

    def predict_proba(self, X):
        scores = np.asarray(X @ self.log_cond.T) + self.log_prior
        return log_normalize(scores)

    def to_dict(self):
        return {"log_prior": self.log_prior.tolist(), "log_cond": self.log_cond.tolist()}

    @classmethod
    def from_dict(cls, d):
        K = len(d["log_prior"])
        return cls(
            np.asarray(d["log_prior"], dtype=float),
            np.asarray(d["log_cond"], dtype=float).reshape(K, -1),
        )


def train_multinomial_nb(X, y, n_classes, params=None, rng=None, nominal=None) -> MultinomialNBPayload:
    """Multinomial NB: add-one smoothed token probabilities per class."""
    require_no_missing(X, "naive_bayes_multinomial")
    require_numeric(nominal or {}, "naive_bayes_multinomial")
    if X.nnz and X.data.min() < 0:
        raise TrainingError("naive_bayes_multinomial needs non-negative attribute values")
    n, V = X.shape
    counts = np.bincount(y, minlength=n_classes).astype(float)
    log_prior = np.log((counts + 1) / (n + n_classes))
    onehot = np.zeros((n, n_classes))
    onehot[np.arange(n), y] = 1.0
    token_counts = np.asarray((X.T @ onehot).T)  # (K, V)
    totals = token_counts.sum(axis=1, keepdims=True)
    log_cond = np.log(token_counts + 1) - np.log(totals + V)
    return MultinomialNBPayload(log_prior, log_cond)
