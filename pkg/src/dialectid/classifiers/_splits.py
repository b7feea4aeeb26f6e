"""Vectorized threshold search over sparse numeric columns.

For a subset of rows, every column is summarized as groups of equal values
(ascending), each with a per-class count vector. Implicit zeros of a sparse
column form one group of their own. Cumulative sums over these groups give
the class counts on the ``<=`` side of every candidate threshold at once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp


@dataclass
class ColumnGroups:
    col: np.ndarray  # (G,) column of each group
    value: np.ndarray  # (G,) value of each group, ascending within a column
    counts: np.ndarray  # (G, K) class counts of the group
    below: np.ndarray  # (G, K) counts of rows with value <= this group's value
    last: np.ndarray  # (G,) True for the last group of its column
    total: np.ndarray  # (K,) class counts of the whole subset


def column_groups(X: sp.csr_matrix, y: np.ndarray, n_classes: int, weights=None) -> ColumnGroups:
    """Group ``X`` (rows already restricted to the subset) by (column, value).

    ``weights`` optionally replaces the unit weight of each row.
    """
    n = X.shape[0]
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=float)
    total = np.bincount(y, weights=w, minlength=n_classes).astype(float)
    coo = X.tocoo()
    rows, cols, vals = coo.row, coo.col, coo.data
    keep = vals != 0
    rows, cols, vals = rows[keep], cols[keep], vals[keep]
    if cols.size == 0:
        empty = np.zeros((0, n_classes))
        return ColumnGroups(np.zeros(0, np.int64), np.zeros(0), empty, empty, np.zeros(0, bool), total)

    cls = y[rows]
    rw = w[rows]
    order = np.lexsort((vals, cols))
    c, v, k, ww = cols[order], vals[order], cls[order], rw[order]
    start = np.ones(c.size, dtype=bool)
    start[1:] = (c[1:] != c[:-1]) | (v[1:] != v[:-1])
    gid = np.cumsum(start) - 1
    G = int(gid[-1]) + 1
    counts = np.zeros((G, n_classes))
    np.add.at(counts, (gid, k), ww)
    gcol = c[start]
    gval = v[start]

    # one group for the implicit zeros of each touched column
    ucols, first = np.unique(gcol, return_index=True)
    per_col = np.add.reduceat(counts, first, axis=0)
    zeros = total[None, :] - per_col
    has_zero = zeros.sum(axis=1) > 1e-12
    gcol = np.concatenate([gcol, ucols[has_zero]])
    gval = np.concatenate([gval, np.zeros(int(has_zero.sum()))])
    counts = np.vstack([counts, zeros[has_zero]])
    order = np.lexsort((gval, gcol))
    gcol, gval, counts = gcol[order], gval[order], counts[order]

    cum = np.cumsum(counts, axis=0)
    col_start = np.ones(gcol.size, dtype=bool)
    col_start[1:] = gcol[1:] != gcol[:-1]
    start_idx = np.flatnonzero(col_start)
    seg = np.cumsum(col_start) - 1
    offset = np.vstack([np.zeros((1, n_classes)), cum[start_idx[1:] - 1]])
    below = cum - offset[seg]
    last = np.ones(gcol.size, dtype=bool)
    last[:-1] = gcol[1:] != gcol[:-1]
    return ColumnGroups(gcol, gval, counts, below, last, total)


def entropy_rows(C: np.ndarray) -> np.ndarray:
    """Entropy in bits of each row of a count matrix (0 for empty rows)."""
    C = np.atleast_2d(C)
    n = C.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(n > 0, C / n, 0.0)
        logs = np.where(p > 0, np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return -(p * logs).sum(axis=1)


def entropy(counts) -> float:
    return float(entropy_rows(np.asarray(counts, dtype=float))[0])


@dataclass
class Split:
    column: int
    threshold: float
    gain: float
    gain_ratio: float
    left: np.ndarray  # class counts with value <= threshold
    right: np.ndarray


def best_split(
    X: sp.csr_matrix,
    y: np.ndarray,
    n_classes: int,
    min_leaf: int,
    criterion: str = "gain_ratio",
    zero_gain_fallback: bool = False,
) -> Split | None:
    """Best binary threshold split of the rows of ``X``.

    Each column proposes its highest-gain threshold (midpoint between
    adjacent distinct values, both sides holding at least ``min_leaf``
    rows). With ``criterion="gain_ratio"`` the winner is the proposal with
    the largest gain ratio among those whose gain is positive and at least
    the mean positive gain; with ``"gain"`` it is the largest gain.
    Ties go to the lowest column, then the lowest threshold.

    With ``zero_gain_fallback`` an impure node whose every split has zero
    gain (an XOR pattern, say) still splits at the first valid threshold.
    """
    g = column_groups(X, y, n_classes)
    n = g.total.sum()
    if g.col.size == 0 or n <= 0:
        return None
    cand = ~g.last
    if not cand.any():
        return None
    L = g.below[cand]
    R = g.total[None, :] - L
    nL, nR = L.sum(axis=1), R.sum(axis=1)
    ok = (nL >= min_leaf) & (nR >= min_leaf)
    if not ok.any():
        return None
    idx = np.flatnonzero(cand)[ok]
    L, R, nL, nR = L[ok], R[ok], nL[ok], nR[ok]
    base = entropy(g.total)
    gain = base - (nL * entropy_rows(L) + nR * entropy_rows(R)) / n
    # guard against round-off making equal partitions look informative
    gain = np.where(gain > 1e-12, gain, 0.0)
    cols = g.col[idx]

    # per column, the threshold of largest gain (first on ties)
    order = np.lexsort((np.arange(gain.size), -gain, cols))
    first = np.ones(order.size, dtype=bool)
    first[1:] = cols[order][1:] != cols[order][:-1]
    best = order[first]
    bgain = gain[best]
    positive = bgain > 0
    if not positive.any():
        if not zero_gain_fallback or np.count_nonzero(g.total) < 2:
            return None
        # candidates are ordered by column, then by threshold
        pick = 0
        gi = idx[pick]
        thr = 0.5 * (g.value[gi] + g.value[gi + 1])
        return Split(int(g.col[gi]), float(thr), 0.0, 0.0, L[pick].copy(), R[pick].copy())
    best, bgain = best[positive], bgain[positive]

    if criterion == "gain":
        pick = best[int(np.argmax(bgain))]
        score = gain[pick]
        ratio = score / _split_info(nL[pick], nR[pick], n)
    else:
        keep = bgain >= bgain.mean() - 1e-12
        best = best[keep]
        ratios = gain[best] / np.array([_split_info(nL[b], nR[b], n) for b in best])
        pick = best[int(np.argmax(ratios))]
        ratio = gain[pick] / _split_info(nL[pick], nR[pick], n)
    gi = idx[pick]
    thr = 0.5 * (g.value[gi] + g.value[gi + 1])
    return Split(int(g.col[gi]), float(thr), float(gain[pick]), float(ratio), L[pick].copy(), R[pick].copy())


def _split_info(nl: float, nr: float, n: float) -> float:
    return entropy([nl, nr])


def information_gain(parent, parts) -> float:
    parent = np.asarray(parent, dtype=float)
    n = parent.sum()
    rem = sum(np.sum(p) * entropy(p) for p in parts) / n
    return entropy(parent) - rem


def gain_ratio(parent, parts) -> float:
    si = entropy([np.sum(p) for p in parts])
    return information_gain(parent, parts) / si if si > 0 else 0.0
