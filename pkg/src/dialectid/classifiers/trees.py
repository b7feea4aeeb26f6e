"""Binary threshold decision trees: C4.5-style and reduced-error pruned."""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np
import scipy.sparse as sp

from ._splits import best_split
from .base import require_no_missing, require_numeric


@dataclass
class Tree:
    """Flat binary tree. Node ``i`` is a leaf when ``column[i] < 0``;
    otherwise rows with ``x[column] <= threshold`` go to ``left[i]``.
    Children always have larger ids than their parent.
    """

    column: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    counts: np.ndarray  # (nodes, K)

    @property
    def n_nodes(self) -> int:
        return self.column.size

    def is_leaf(self, i: int) -> bool:
        return self.column[i] < 0

    def reachable(self) -> list[int]:
        out, stack = [], [0]
        while stack:
            i = stack.pop()
            out.append(i)
            if not self.is_leaf(i):
                stack += [self.right[i], self.left[i]]
        return sorted(out)

    def leaves(self) -> list[int]:
        return [i for i in self.reachable() if self.is_leaf(i)]

    def apply(self, X) -> np.ndarray:
        """Leaf id reached by each row."""
        X = sp.csc_matrix(X)
        n = X.shape[0]
        node = np.zeros(n, dtype=np.int64)
        cache: dict[int, np.ndarray] = {}
        for i in self.reachable():
            if self.is_leaf(i):
                continue
            here = np.flatnonzero(node == i)
            if here.size == 0:
                continue
            c = int(self.column[i])
            if c not in cache:
                cache[c] = X.getcol(c).toarray().ravel() if c < X.shape[1] else np.zeros(n)
            go_left = cache[c][here] <= self.threshold[i]
            node[here[go_left]] = self.left[i]
            node[here[~go_left]] = self.right[i]
        return node

    def predict_proba(self, X) -> np.ndarray:
        C = self.counts[self.apply(X)]
        s = C.sum(axis=1, keepdims=True)
        return np.divide(C, s, out=np.full_like(C, 1.0 / C.shape[1]), where=s > 0)

    def route_counts(self, X, y, n_classes) -> np.ndarray:
        """Class counts of (X, y) arriving at every node, internal ones included."""
        leaf = self.apply(X)
        out = np.zeros((self.n_nodes, n_classes))
        np.add.at(out, (leaf, y), 1.0)
        for i in reversed(self.reachable()):
            if not self.is_leaf(i):
                out[i] = out[self.left[i]] + out[self.right[i]]
        return out

    def make_leaf(self, i: int) -> None:
        self.column[i] = -1
        self.left[i] = -1
        self.right[i] = -1

    def compact(self) -> "Tree":
        keep = self.reachable()
        remap = {old: new for new, old in enumerate(keep)}
        idx = np.asarray(keep)
        left = np.array([remap.get(int(v), -1) for v in self.left[idx]], dtype=np.int64)
        right = np.array([remap.get(int(v), -1) for v in self.right[idx]], dtype=np.int64)
        return Tree(self.column[idx].copy(), self.threshold[idx].copy(), left, right, self.counts[idx].copy())

    def copy(self) -> "Tree":
        return Tree(self.column.copy(), self.threshold.copy(), self.left.copy(), self.right.copy(), self.counts.copy())

    def to_dict(self) -> dict:
        return {
            "column": self.column.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "counts": self.counts.tolist(),
        }

    @classmethod
    def from_dict(cls, d) -> "Tree":
        counts = np.asarray(d["counts"], dtype=float)
        return cls(
            np.asarray(d["column"], dtype=np.int64),
            np.asarray(d["threshold"], dtype=float),
            np.asarray(d["left"], dtype=np.int64),
            np.asarray(d["right"], dtype=np.int64),
            counts.reshape(len(d["column"]), -1),
        )

    def describe(self, names=None, labels=None) -> str:
        """Indented text rendering, one line per branch."""
        lines = []
        stack = [(0, 0, "")]
        while stack:
            i, depth, cond = stack.pop()
            pad = "|   " * max(depth - 1, 0)
            if self.is_leaf(i):
                k = int(np.argmax(self.counts[i]))
                lab = labels[k] if labels else k
                lines.append(f"{pad}{cond}: {lab} ({self.counts[i].sum():g})")
                continue
            if cond:
                lines.append(pad + cond)
            c = int(self.column[i])
            name = names[c] if names else f"x{c}"
            thr = f"{self.threshold[i]:g}"
            stack.append((self.right[i], depth + 1, f"{name} > {thr}"))
            stack.append((self.left[i], depth + 1, f"{name} <= {thr}"))
        return "\n".join(lines)


def grow_tree(X, y, n_classes, min_leaf=2, criterion="gain_ratio", zero_gain_fallback=False) -> Tree:
    """Greedy top-down induction; a node stays a leaf when it is pure,
    holds fewer than ``2 * min_leaf`` rows or has no positive-gain split
    (no split at all with ``zero_gain_fallback``)."""
    X = sp.csr_matrix(X)
    y = np.asarray(y, dtype=np.int64)
    column, threshold, left, right, counts = [], [], [], [], []

    def new_node(rows) -> int:
        column.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        counts.append(np.bincount(y[rows], minlength=n_classes).astype(float))
        return len(column) - 1

    root_rows = np.arange(X.shape[0])
    stack = [(new_node(root_rows), root_rows)]
    while stack:
        i, rows = stack.pop()
        c = counts[i]
        if rows.size < 2 * min_leaf or np.count_nonzero(c) <= 1:
            continue
        split = best_split(X[rows], y[rows], n_classes, min_leaf, criterion, zero_gain_fallback)
        if split is None:
            continue
        vals = X[rows].getcol(split.column).toarray().ravel()
        lrows = rows[vals <= split.threshold]
        rrows = rows[vals > split.threshold]
        column[i] = split.column
        threshold[i] = split.threshold
        left[i] = new_node(lrows)
        right[i] = new_node(rrows)
        # right first so the left subtree is expanded first
        stack.append((right[i], rrows))
        stack.append((left[i], lrows))

    return Tree(
        np.asarray(column, dtype=np.int64),
        np.asarray(threshold, dtype=float),
        np.asarray(left, dtype=np.int64),
        np.asarray(right, dtype=np.int64),
        np.vstack(counts) if counts else np.zeros((0, n_classes)),
    )


def added_errors(n: float, e: float, cf: float) -> float:
    """Extra errors predicted at confidence ``cf`` for a leaf with ``e``
    errors out of ``n`` (upper bound of the binomial confidence interval,
    normal approximation with continuity correction)."""
    if n <= 0:
        return 0.0
    if e < 1:
        base = n * (1 - cf ** (1 / n))
        if e == 0:
            return base
        return base + e * (added_errors(n, 1.0, cf) - base)
    if e + 0.5 >= n:
        return max(n - e, 0.0)
    z = NormalDist().inv_cdf(1 - cf)
    f = (e + 0.5) / n
    r = (f + z * z / (2 * n) + z * math.sqrt(f / n - f * f / n + z * z / (4 * n * n))) / (1 + z * z / n)
    return r * n - e


def pessimistic_prune(tree: Tree, cf: float) -> Tree:
    """Bottom-up subtree replacement: a subtree becomes a leaf when the
    leaf's estimated errors do not exceed the subtree's."""
    tree = tree.copy()
    est = np.zeros(tree.n_nodes)
    for i in reversed(tree.reachable()):
        c = tree.counts[i]
        n = c.sum()
        e = n - c.max()
        as_leaf = e + added_errors(n, e, cf)
        if tree.is_leaf(i):
            est[i] = as_leaf
            continue
        sub = est[tree.left[i]] + est[tree.right[i]]
        if as_leaf <= sub + 1e-9:
            tree.make_leaf(i)
            est[i] = as_leaf
        else:
            est[i] = sub
    return tree.compact()


def reduced_error_prune(tree: Tree, X_prune, y_prune, n_classes) -> Tree:
    """Replace every subtree whose removal does not increase the number of
    prune-set errors. A node predicts the majority of its growing counts."""
    tree = tree.copy()
    routed = tree.route_counts(X_prune, np.asarray(y_prune, dtype=np.int64), n_classes)
    err = np.zeros(tree.n_nodes)
    for i in reversed(tree.reachable()):
        k = int(np.argmax(tree.counts[i]))
        as_leaf = routed[i].sum() - routed[i][k]
        if tree.is_leaf(i):
            err[i] = as_leaf
            continue
        sub = err[tree.left[i]] + err[tree.right[i]]
        if as_leaf <= sub:
            tree.make_leaf(i)
            err[i] = as_leaf
        else:
            err[i] = sub
    return tree.compact()


def prune_set_errors(tree: Tree, X, y) -> int:
    leaf = tree.apply(X)
    pred = np.argmax(tree.counts[leaf], axis=1)
    return int(np.sum(pred != np.asarray(y)))


@dataclass
class TreePayload:
    tree: Tree

    def predict_proba(self, X):
        return self.tree.predict_proba(X)

    def describe(self, names=None, labels=None) -> str:
        return self.tree.describe(names, labels)

    def to_dict(self):
        return self.tree.to_dict()

    @classmethod
    def from_dict(cls, d):
        return cls(Tree.from_dict(d))


def train_c45(X, y, n_classes, params=None, rng=None, nominal=None) -> TreePayload:
    params = params or {}
    require_no_missing(X, "c45")
    require_numeric(nominal or {}, "c45")
    pruned = params.get("pruned", True)
    # an unpruned tree keeps splitting impure nodes even without gain, so it
    # fits any consistent training set exactly
    tree = grow_tree(X, y, n_classes, int(params.get("min_leaf", 2)), "gain_ratio", zero_gain_fallback=not pruned)
    if pruned:
        tree = pessimistic_prune(tree, params.get("confidence_factor", 0.25))
    return TreePayload(tree)


def grow_prune_split(y, fraction, rng) -> tuple[np.ndarray, np.ndarray]:
    """Stratified random split; returns (grow rows, prune rows)."""
    y = np.asarray(y)
    perm = rng.permutation(y.size)
    perm = perm[np.argsort(y[perm], kind="stable")]
    pos = np.arange(y.size)
    take = np.floor((pos + 1) * fraction) > np.floor(pos * fraction)
    return np.sort(perm[~take]), np.sort(perm[take])


def train_rep_tree(X, y, n_classes, params=None, rng=None, nominal=None) -> TreePayload:
    params = params or {}
    require_no_missing(X, "rep_tree")
    require_numeric(nominal or {}, "rep_tree")
    rng = rng if rng is not None else np.random.default_rng(1)
    X = sp.csr_matrix(X)
    y = np.asarray(y, dtype=np.int64)
    min_leaf = int(params.get("min_leaf", 2))
    if not params.get("pruned", True) or y.size < 3:
        return TreePayload(grow_tree(X, y, n_classes, min_leaf, "gain"))
    grow, prune = grow_prune_split(y, params.get("prune_fraction", 1 / 3), rng)
    tree = grow_tree(X[grow], y[grow], n_classes, min_leaf, "gain")
    tree = reduced_error_prune(tree, X[prune], y[prune], n_classes)
    # leaf distributions from the whole training set
    tree.counts = tree.route_counts(X, y, n_classes)
    return TreePayload(tree)
