"""Ordered rule lists learned with RIPPER.

Classes are handled from least to most frequent. For each class a rule set
separating it from the classes not yet handled is grown rule by rule:

* the uncovered data is split 2/3 for growing and 1/3 for pruning;
* a rule is grown by adding the condition with the best FOIL gain until it
  covers no negative growing example;
* the rule is pruned back to the prefix maximizing ``(p - n) / (p + n)`` on
  the pruning data;
* rule addition stops when the pruned rule errs on more than half of the
  pruning examples it covers, or when the description length exceeds the
  smallest seen so far by more than 64 bits.

Description length (bits) is theory plus exceptions. A rule with ``k`` of
``m`` possible conditions costs ``0.5 * (log2 k + S(m, k, k/m))`` with
``S(m, k, p) = -k log2 p - (m - k) log2 (1 - p)``; the exceptions of a rule
set covering ``c`` of ``N`` examples with ``fp`` false positives and ``fn``
false negatives cost ``log2 C(c, fp) + log2 C(N - c, fn)``.

After the initial rule set, ``optimizations`` passes consider for each rule
a replacement grown from scratch and a revision grown from the rule itself,
keeping whichever variant gives the smallest description length. Residual
positives get new rules, and rules that do not reduce description length
are dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ._splits import column_groups
from .base import require_no_missing, require_numeric

DL_ALLOWANCE = 64.0


@dataclass(frozen=True)
class Condition:
    column: int
    op: str  # "<=" or ">="
    value: float

    def holds(self, col_values: np.ndarray) -> np.ndarray:
        if self.op == "<=":
            return col_values <= self.value
        return col_values >= self.value

    def __str__(self):
        return f"x{self.column} {self.op} {self.value:g}"


@dataclass
class Rule:
    conditions: list[Condition]
    label: int
    counts: np.ndarray | None = None  # training counts of first-matched rows

    def __str__(self):
        body = " and ".join(str(c) for c in self.conditions) or "true"
        return f"({body}) => {self.label}"


class _Columns:
    """Dense column cache over a fixed CSC matrix."""

    def __init__(self, X):
        self.X = sp.csc_matrix(X)
        self.cache: dict[int, np.ndarray] = {}

    def __getitem__(self, j: int) -> np.ndarray:
        if j not in self.cache:
            self.cache[j] = self.X.getcol(j).toarray().ravel()
        return self.cache[j]

    def covers(self, conds, rows=None) -> np.ndarray:
        n = self.X.shape[0] if rows is None else len(rows)
        mask = np.ones(n, dtype=bool)
        for c in conds:
            vals = self[c.column] if rows is None else self[c.column][rows]
            mask &= c.holds(vals)
        return mask


def foil_gain(p0: float, n0: float, p1: float, n1: float) -> float:
    """FOIL information gain of refining coverage (p0, n0) to (p1, n1)."""
    if p1 <= 0 or p0 <= 0:
        return 0.0
    return p1 * (math.log2(p1 / (p1 + n1)) - math.log2(p0 / (p0 + n0)))


def _log2_comb(n: int, k: int) -> float:
    if k < 0 or k > n:
        return 0.0
    return (math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)) / math.log(2)


def _subset_bits(m: int, k: int) -> float:
    if m <= 0 or k <= 0:
        return 0.0
    p = k / m
    out = -k * math.log2(p)
    if k < m:
        out -= (m - k) * math.log2(1 - p)
    return out


def theory_bits(rule: Rule, n_possible: int) -> float:
    k = len(rule.conditions)
    if k == 0:
        return 0.0
    return 0.5 * (math.log2(k) + _subset_bits(max(n_possible, k), k))


def exception_bits(covered: np.ndarray, positive: np.ndarray) -> float:
    N = covered.size
    c = int(covered.sum())
    fp = int((covered & ~positive).sum())
    fn = int((~covered & positive).sum())
    return _log2_comb(c, fp) + _log2_comb(N - c, fn)


class _BinaryLearner:
    """Rule set for one class against the rest, on a fixed row subset."""

    def __init__(self, cols: _Columns, X, rows, positive, rng, min_coverage):
        self.cols = cols
        self.X = X  # CSR over all training rows
        self.rows = rows  # rows of this sub-problem
        self.pos = positive  # bool over self.rows
        self.rng = rng
        self.min_coverage = min_coverage
        g = column_groups(X[rows], positive.astype(np.int64), 2)
        self.n_possible = max(2 * int((~g.last).sum()), 1)

    # -- coverage helpers
    def covered_by(self, rules, rows) -> np.ndarray:
        mask = np.zeros(len(rows), dtype=bool)
        for r in rules:
            mask |= self.cols.covers(r.conditions, rows)
        return mask

    def description_length(self, rules) -> float:
        covered = self.covered_by(rules, self.rows)
        return sum(theory_bits(r, self.n_possible) for r in rules) + exception_bits(covered, self.pos)

    def split(self, rows, pos):
        """Stratified 2/3 grow, 1/3 prune split of the given rows."""
        perm = self.rng.permutation(len(rows))
        perm = perm[np.argsort(~pos[perm], kind="stable")]
        k = np.arange(len(rows))
        prune = np.floor((k + 1) / 3) > np.floor(k / 3)
        g, p = perm[~prune], perm[prune]
        return rows[g], pos[g], rows[p], pos[p]

    # -- growing and pruning
    def grow(self, rows, pos, start=()) -> list[Condition]:
        conds = list(start)
        mask = self.cols.covers(conds, rows) if conds else np.ones(len(rows), dtype=bool)
        while True:
            r, p = rows[mask], pos[mask]
            p0, n0 = float(p.sum()), float((~p).sum())
            if n0 == 0 or p0 == 0:
                break
            best = self._best_condition(r, p, p0, n0)
            if best is None:
                break
            conds.append(best)
            mask &= best.holds(self.cols[best.column][rows])
        return conds

    def _best_condition(self, rows, pos, p0, n0) -> Condition | None:
        g = column_groups(self.X[rows], pos.astype(np.int64), 2)
        cand = np.flatnonzero(~g.last)
        if cand.size == 0:
            return None
        below = g.below[cand]
        le_p, le_n = below[:, 1], below[:, 0]
        ge_p, ge_n = g.total[1] - le_p, g.total[0] - le_n
        base = math.log2(p0 / (p0 + n0))

        def gains(P, N):
            with np.errstate(divide="ignore", invalid="ignore"):
                out = P * (np.log2(P / (P + N)) - base)
            ok = (P > 0) & (P + N >= self.min_coverage)
            return np.where(ok, out, -np.inf)

        gl, gg = gains(le_p, le_n), gains(ge_p, ge_n)
        il, ig = int(np.argmax(gl)), int(np.argmax(gg))
        if max(gl[il], gg[ig]) <= 1e-12:
            return None
        if gl[il] >= gg[ig]:
            gi = cand[il]
            return Condition(int(g.col[gi]), "<=", float(g.value[gi]))
        gi = cand[ig]
        return Condition(int(g.col[gi]), ">=", float(g.value[gi + 1]))

    def prune_for_rule(self, conds, rows, pos, keep=0) -> list[Condition]:
        """Keep the prefix maximizing (p - n) / (p + n) on the pruning rows."""
        if len(conds) <= 1:
            return conds
        best_len, best_v = len(conds), -math.inf
        mask = np.ones(len(rows), dtype=bool)
        values = []
        for c in conds:
            mask = mask & c.holds(self.cols[c.column][rows])
            p = float((mask & pos).sum())
            n = float((mask & ~pos).sum())
            values.append((p - n) / (p + n) if p + n > 0 else -math.inf)
        for length in range(max(keep, 1), len(conds) + 1):
            v = values[length - 1]
            if v > best_v:
                best_v, best_len = v, length
        return conds[:best_len]

    def prune_for_ruleset(self, conds, others, rows, pos, keep=0) -> list[Condition]:
        """Keep the prefix minimizing the rule set's error on the pruning rows."""
        if len(conds) <= 1:
            return conds
        base = self.covered_by(others, rows)
        best_len, best_err = len(conds), math.inf
        mask = np.ones(len(rows), dtype=bool)
        errs = []
        for c in conds:
            mask = mask & c.holds(self.cols[c.column][rows])
            pred = base | mask
            errs.append(int((pred != pos).sum()))
        for length in range(max(keep, 1), len(conds) + 1):
            if errs[length - 1] < best_err:
                best_err, best_len = errs[length - 1], length
        return conds[:best_len]

    # -- rule set construction
    def cover(self, rules, label) -> list[Rule]:
        """Add rules until positives run out or a stopping rule fires."""
        rules = list(rules)
        live = ~self.covered_by(rules, self.rows)
        best_dl = self.description_length(rules)
        while True:
            rows, pos = self.rows[live], self.pos[live]
            if pos.sum() == 0:
                break
            grow_rows, grow_pos, prune_rows, prune_pos = self.split(rows, pos)
            if grow_pos.sum() == 0:
                grow_rows, grow_pos = rows, pos
            conds = self.grow(grow_rows, grow_pos)
            if not conds:
                break
            conds = self.prune_for_rule(conds, prune_rows, prune_pos)
            m = self.cols.covers(conds, prune_rows)
            p, n = int((m & prune_pos).sum()), int((m & ~prune_pos).sum())
            if p + n > 0 and n / (p + n) > 0.5:
                break
            rule = Rule(conds, label)
            newly = self.cols.covers(conds, rows)
            if not (newly & pos).any():
                break
            rules.append(rule)
            dl = self.description_length(rules)
            if dl > best_dl + DL_ALLOWANCE:
                break
            best_dl = min(best_dl, dl)
            live_idx = np.flatnonzero(live)
            live[live_idx[newly]] = False
        return self.compress(rules)

    def compress(self, rules) -> list[Rule]:
        """Drop rules, last first, whenever that lowers description length."""
        rules = list(rules)
        for i in range(len(rules) - 1, -1, -1):
            trial = rules[:i] + rules[i + 1:]
            if self.description_length(trial) < self.description_length(rules):
                rules = trial
        return rules

    def optimize(self, rules, label) -> list[Rule]:
        rules = list(rules)
        for i in range(len(rules)):
            others = rules[:i] + rules[i + 1:]
            grow_rows, grow_pos, prune_rows, prune_pos = self.split(self.rows, self.pos)
            free = ~self.covered_by(others, grow_rows)
            g_rows, g_pos = grow_rows[free], grow_pos[free]
            if g_pos.sum() == 0:
                continue
            rep = self.grow(g_rows, g_pos)
            rep = self.prune_for_ruleset(rep, others, prune_rows, prune_pos)
            orig = rules[i].conditions
            rev = self.grow(g_rows, g_pos, start=orig)
            rev = self.prune_for_ruleset(rev, others, prune_rows, prune_pos, keep=len(orig))
            variants = [orig] + [v for v in (rep, rev) if v and v != orig]
            best = min(
                variants,
                key=lambda v: self.description_length(rules[:i] + [Rule(v, label)] + rules[i + 1:]),
            )
            rules[i] = Rule(best, label)
        return rules


@dataclass
class RipperPayload:
    rules: list[Rule] = field(default_factory=list)
    default: int = 0
    default_counts: np.ndarray | None = None
    n_classes: int = 2

    def _dist(self, counts, label):
        if counts is not None and counts.sum() > 0:
            return counts / counts.sum()
        out = np.zeros(self.n_classes)
        out[label] = 1.0
        return out

    def first_match(self, X) -> np.ndarray:
        """Index of the first matching rule per row; len(rules) = default."""
        cols = _Columns(X)
        n = X.shape[0]
        which = np.full(n, len(self.rules), dtype=np.int64)
        open_ = np.ones(n, dtype=bool)
        for k, r in enumerate(self.rules):
            hit = open_ & cols.covers(r.conditions)
            which[hit] = k
            open_ &= ~hit
        return which

    def predict_proba(self, X):
        which = self.first_match(X)
        table = np.vstack(
            [self._dist(r.counts, r.label) for r in self.rules]
            + [self._dist(self.default_counts, self.default)]
        )
        return table[which]

    def describe(self, names=None, labels=None) -> str:
        def cond(c):
            name = names[c.column] if names else f"x{c.column}"
            return f"{name} {c.op} {c.value:g}"

        def lab(k):
            return labels[k] if labels else k

        out = [f"({' and '.join(cond(c) for c in r.conditions)}) => {lab(r.label)}" for r in self.rules]
        out.append(f"=> {lab(self.default)}")
        return "\n".join(out)

    def to_dict(self):
        return {
            "n_classes": int(self.n_classes),
            "default": int(self.default),
            "default_counts": None if self.default_counts is None else self.default_counts.tolist(),
            "rules": [
                {
                    "label": int(r.label),
                    "conditions": [[int(c.column), c.op, float(c.value)] for c in r.conditions],
                    "counts": None if r.counts is None else r.counts.tolist(),
                }
                for r in self.rules
            ],
        }

    @classmethod
    def from_dict(cls, d):
        rules = [
            Rule(
                [Condition(int(c), op, float(v)) for c, op, v in r["conditions"]],
                r["label"],
                None if r["counts"] is None else np.asarray(r["counts"], dtype=float),
            )
            for r in d["rules"]
        ]
        dc = d["default_counts"]
        return cls(rules, d["default"], None if dc is None else np.asarray(dc, dtype=float), d["n_classes"])


def train_ripper(X, y, n_classes, params=None, rng=None, nominal=None) -> RipperPayload:
    params = params or {}
    require_no_missing(X, "ripper")
    require_numeric(nominal or {}, "ripper")
    rng = rng if rng is not None else np.random.default_rng(1)
    X = sp.csr_matrix(X)
    y = np.asarray(y, dtype=np.int64)
    optimizations = int(params.get("optimizations", 2))
    min_coverage = float(params.get("min_coverage", 2.0))
    cols = _Columns(X)

    freq = np.bincount(y, minlength=n_classes)
    present = [k for k in np.argsort(freq, kind="stable") if freq[k] > 0]
    remaining = np.arange(y.size)
    rules: list[Rule] = []
    for label in present[:-1]:
        pos = y[remaining] == label
        if pos.sum() == 0:
            continue
        learner = _BinaryLearner(cols, X, remaining, pos, rng, min_coverage)
        ruleset = learner.cover([], label)
        for _ in range(optimizations):
            ruleset = learner.optimize(ruleset, label)
            ruleset = learner.cover(ruleset, label)
        rules.extend(ruleset)
        covered = learner.covered_by(ruleset, remaining)
        remaining = remaining[~covered]

    if remaining.size:
        default = int(np.argmax(np.bincount(y[remaining], minlength=n_classes)))
    else:
        default = int(present[-1]) if present else 0
    payload = RipperPayload(rules, default, None, n_classes)

    which = payload.first_match(X)
    table = np.zeros((len(rules) + 1, n_classes))
    np.add.at(table, (which, y), 1.0)
    for k, r in enumerate(rules):
        r.counts = table[k]
    payload.default_counts = table[-1]
    return payload
