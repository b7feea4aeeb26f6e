"""Independent reference computations used by the tests.

None of these share code with the library; they trade speed for
obviousness (enumeration, exact fractions, pairwise comparison).
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np


def svm_dual_optimum(X, y, C):
    """Exact maximum of the soft-margin SVM dual on a tiny problem.

    Enumerates every assignment of each multiplier to {lower bound, upper
    bound, free}, solves the stationarity plus equality system for the free
    ones and keeps the best feasible candidate. The optimum sits at a point
    where the free multipliers are uniquely determined, so it is among them.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n = y.size
    Q = (y[:, None] * y[None, :]) * (X @ X.T)
    best, best_alpha = -math.inf, None
    for state in itertools.product((0, 1, 2), repeat=n):
        alpha = np.array([C if s == 1 else 0.0 for s in state])
        free = [i for i, s in enumerate(state) if s == 2]
        if free:
            F = np.asarray(free)
            B = np.asarray([i for i in range(n) if state[i] != 2], dtype=int)
            m = F.size
            A = np.zeros((m + 1, m + 1))
            A[:m, :m] = Q[np.ix_(F, F)]
            A[:m, m] = y[F]
            A[m, :m] = y[F]
            rhs = np.zeros(m + 1)
            rhs[:m] = 1 - (Q[np.ix_(F, B)] @ alpha[B] if B.size else 0)
            rhs[m] = -(y[B] @ alpha[B] if B.size else 0)
            sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
            if np.max(np.abs(A @ sol - rhs)) > 1e-9:
                continue
            alpha[F] = sol[:m]
        if np.any(alpha < -1e-12) or np.any(alpha > C + 1e-12) or abs(alpha @ y) > 1e-9:
            continue
        val = alpha.sum() - 0.5 * alpha @ Q @ alpha
        if val > best:
            best, best_alpha = val, alpha
    return best, best_alpha


def multinomial_posterior(train_docs, train_labels, doc, n_classes, vocab_size):
    """Posterior of a multinomial model with add-one smoothing, in exact
    rational arithmetic by direct enumeration of the product."""
    counts = [[0] * vocab_size for _ in range(n_classes)]
    n_docs = [0] * n_classes
    for d, c in zip(train_docs, train_labels):
        n_docs[c] += 1
        for t, f in enumerate(d):
            counts[c][t] += f
    joint = []
    for c in range(n_classes):
        prior = Fraction(n_docs[c] + 1, len(train_docs) + n_classes)
        total = sum(counts[c])
        p = prior
        for t, f in enumerate(doc):
            for _ in range(f):
                p *= Fraction(counts[c][t] + 1, total + vocab_size)
        joint.append(p)
    z = sum(joint)
    return [j / z for j in joint]


def mann_whitney(pos_scores, neg_scores):
    """Fraction of positive/negative pairs ordered correctly, ties as half."""
    total = 0.0
    for p in pos_scores:
        for q in neg_scores:
            total += 1.0 if p > q else 0.5 if p == q else 0.0
    return total / (len(pos_scores) * len(neg_scores))
