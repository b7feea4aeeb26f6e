"""Linear support vector machines trained by sequential minimal optimization.

The binary solver works on the dual

    max  sum(a) - 1/2 sum_ij a_i a_j y_i y_j <x_i, x_j>
    s.t. 0 <= a_i <= C,  sum(a_i y_i) = 0

and updates two multipliers at a time. The pair is the maximal violating
pair with second-order selection of the second index. It stops once the
largest KKT violation drops below ``tolerance`` and the primal-dual gap
below ``gap_tolerance``.

Multiclass problems use one machine per unordered class pair; each machine
casts one vote and the distribution is the vote share.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .base import TrainingError

_TAU = 1e-12


class ConvergenceError(RuntimeError):
    def __init__(self, message, iterations, violation, duality_gap):
        super().__init__(
            f"{message} after {iterations} iterations "
            f"(max KKT violation {violation:.3g}, duality gap {duality_gap:.3g})"
        )
        self.iterations = iterations
        self.violation = violation
        self.duality_gap = duality_gap


@dataclass
class BinarySolution:
    alpha: np.ndarray
    bias: float
    iterations: int
    objective: float

    def decision(self, K_rows: np.ndarray, y: np.ndarray) -> np.ndarray:
        return K_rows @ (self.alpha * y) + self.bias


def dual_objective(alpha, y, K) -> float:
    ay = alpha * y
    return float(alpha.sum() - 0.5 * ay @ K @ ay)


def primal_objective(alpha, bias, y, K, C) -> float:
    ay = alpha * y
    f = K @ ay + bias
    return float(0.5 * ay @ K @ ay + C * np.maximum(0.0, 1 - y * f).sum())


def _gram(X) -> np.ndarray:
    if sp.issparse(X):
        return np.asarray((X @ X.T).toarray(), dtype=float)
    X = np.asarray(X, dtype=float)
    return X @ X.T


def _pair_step(a_i, a_j, yi, yj, Gi, Gj, eta, C):
    """Analytic optimum of the two-variable subproblem, clipped to the box."""
    if yi != yj:
        delta = (-Gi - Gj) / eta
        diff = a_i - a_j
        a_i += delta
        a_j += delta
        if diff > 0:
            if a_j < 0:
                a_j, a_i = 0.0, diff
        elif a_i < 0:
            a_i, a_j = 0.0, -diff
        if diff > 0:
            if a_i > C:
                a_i, a_j = C, C - diff
        elif a_j > C:
            a_j, a_i = C, C + diff
    else:
        delta = (Gi - Gj) / eta
        total = a_i + a_j
        a_i -= delta
        a_j += delta
        if total > C:
            if a_i > C:
                a_i, a_j = C, total - C
        elif a_j < 0:
            a_j, a_i = 0.0, total
        if total > C:
            if a_j > C:
                a_j, a_i = C, total - C
        elif a_i < 0:
            a_i, a_j = 0.0, total
    return a_i, a_j


def _extremes(alpha, y, G, C):
    """(m, M): the largest violating score over the "up" set and the
    smallest over the "low" set, plus the score vector and both masks."""
    pos = y > 0
    up = np.where(pos, alpha < C, alpha > 0)
    low = np.where(pos, alpha > 0, alpha < C)
    score = -y * G
    gmax = np.max(score, where=up, initial=-np.inf)
    gmin = np.min(score, where=low, initial=np.inf)
    return gmax, gmin, score, up, low


def smo_solve_binary(X, y, C: float = 1.0, tolerance: float = 1e-3, max_iter: int = 1_000_000,
                     gram: np.ndarray | None = None, gap_tolerance: float = 1e-7) -> BinarySolution:
    """Solve the linear-kernel soft-margin SVM dual for labels in {-1, +1}.

    Iterates until the maximal violating pair differs by less than
    ``tolerance`` (so every KKT condition holds within it) and the
    primal-dual gap is below ``gap_tolerance``. Multipliers stuck at a bound
    that cannot be part of a violating pair are set aside (shrinking); the
    full gradient is rebuilt from the Gram matrix before every global check.

    Returns the multipliers and the bias ``b`` of the decision value
    ``f(x) = sum_i a_i y_i <x_i, x> + b``.
    """
    y = np.asarray(y, dtype=float)
    if not (np.any(y > 0) and np.any(y < 0)):
        raise TrainingError("smo_solve_binary needs at least one instance of each sign")
    if not np.all(np.abs(y) == 1):
        raise ValueError("labels must be -1 or +1")
    K = _gram(X) if gram is None else gram
    n = y.size
    alpha = np.zeros(n)
    # gradient of the minimization form 1/2 a'Qa - e'a, Q_ij = y_i y_j K_ij
    G = -np.ones(n)
    shrink_every = min(n, 1000)
    phase_tol = tolerance
    it = 0

    while True:
        active = np.arange(n)
        while True:
            # optimize on the active set until its pair gap closes
            a, g, yy = alpha[active], G[active], y[active]
            Ka = K[np.ix_(active, active)]
            da = np.diag(Ka).copy()
            countdown = shrink_every
            reshrink = False
            while True:
                gmax, gmin, score, up, low = _extremes(a, yy, g, C)
                if gmax - gmin < phase_tol:
                    break
                if it >= max_iter:
                    alpha[active], G[active] = a, g
                    G = K @ (alpha * y) * y - 1
                    gm, gn, *_ = _extremes(alpha, y, G, C)
                    raise ConvergenceError("SMO did not converge", it, gm - gn, _gap(alpha, y, G, C))
                countdown -= 1
                if countdown <= 0 and active.size > 2:
                    keep = ~((up & ~low & (score < gmin)) | (low & ~up & (score > gmax)))
                    if not keep.all():
                        alpha[active], G[active] = a, g
                        active = active[keep]
                        reshrink = True
                        break
                    countdown = shrink_every
                i = int(np.argmax(np.where(up, score, -np.inf)))
                Ki = Ka[i]
                # second-order choice of j among violating members of the low set
                bdiff = gmax - score
                quad = da[i] + da - 2 * Ki
                quad[quad <= 0] = _TAU
                gain = np.where(low & (score < gmax), bdiff * bdiff / quad, -np.inf)
                j = int(np.argmax(gain))
                Kj = Ka[j]
                yi, yj = yy[i], yy[j]
                eta = max(da[i] + da[j] - 2 * Ki[j], _TAU)
                a_i, a_j = _pair_step(a[i], a[j], yi, yj, g[i], g[j], eta, C)
                d_i, d_j = a_i - a[i], a_j - a[j]
                a[i], a[j] = a_i, a_j
                g += yy * (Ki * (yi * d_i) + Kj * (yj * d_j))
                it += 1
            if not reshrink:
                alpha[active] = a
                break

        # exact gradient over every multiplier, shrunk ones included
        G = K @ (alpha * y) * y - 1
        gmax, gmin, *_ = _extremes(alpha, y, G, C)
        if gmax - gmin < tolerance:
            if _gap(alpha, y, G, C) <= gap_tolerance:
                break
            polished = _polish(alpha, y, K, C)
            if polished is not None:
                G2 = K @ (polished * y) * y - 1
                m2, n2, *_ = _extremes(polished, y, G2, C)
                if m2 - n2 < tolerance and _gap(polished, y, G2, C) <= gap_tolerance:
                    alpha, G = polished, G2
                    break
        if gmax - gmin < phase_tol:
            if phase_tol < 1e-14:
                break  # the gap is at rounding level
            phase_tol /= 10

    bias = _bias(alpha, y, G, C)
    # remove the drift from repeated pair updates
    alpha = np.clip(alpha, 0.0, C)
    return BinarySolution(alpha, bias, it, dual_objective(alpha, y, K))


def _polish(alpha, y, K, C, rounds: int = 10):
    """Exact optimum for the current guess of which multipliers are free.

    Keeps the bounded multipliers fixed and solves the stationarity and
    equality conditions for the free ones. Free multipliers that land
    outside the box move to the nearer bound, bounded ones whose margin
    breaks their KKT condition become free, and the system is solved again.
    Returns None when no consistent, KKT-satisfying answer turns up.
    """
    eps = 1e-9 * C
    free = (alpha > eps) & (alpha < C - eps)
    out = np.where(alpha >= C - eps, C, 0.0)
    for _ in range(rounds):
        F = np.flatnonzero(free)
        if F.size == 0:
            return None
        B = np.flatnonzero(~free)
        m = F.size
        A = np.zeros((m + 1, m + 1))
        A[:m, :m] = (y[F, None] * y[None, F]) * K[np.ix_(F, F)]
        A[:m, m] = y[F]
        A[m, :m] = y[F]
        rhs = np.empty(m + 1)
        rhs[:m] = 1 - y[F] * (K[np.ix_(F, B)] @ (out[B] * y[B]))
        rhs[m] = -(y[B] @ out[B])
        sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
        if np.max(np.abs(A @ sol - rhs)) > 1e-9 * max(1.0, np.abs(rhs).max()):
            return None
        a = sol[:m]
        low, high = a < 0, a > C
        if not (low.any() or high.any()):
            out[F] = a
            # the multiplier of the equality constraint is the bias
            yf = y * (K @ (out * y)) + y * sol[m]
            wrong = ~free & (((out == 0) & (yf < 1 - 1e-9)) | ((out == C) & (yf > 1 + 1e-9)))
            if not wrong.any():
                return out
            free |= wrong
            continue
        out[F[low]] = 0.0
        out[F[high]] = C
        free[F[low | high]] = False
    return None


def _gap(alpha, y, G, C) -> float:
    """Primal minus dual objective, from the gradient alone.

    With G = Qa - 1 we have y_i f(x_i) = G_i + 1 + y_i b, so the gap is
    a'G + C * sum(max(0, -G_i - y_i b)).
    """
    b = _bias(alpha, y, G, C)
    return float(alpha @ G + C * np.maximum(0.0, -G - y * b).sum())


def _bias(alpha, y, G, C) -> float:
    yG = y * G
    free = (alpha > 0) & (alpha < C)
    if np.any(free):
        rho = float(yG[free].mean())
    else:
        pos = y > 0
        at_upper = alpha >= C
        # bounds on rho from the multipliers sitting at 0 or C
        ub_mask = np.where(pos, alpha <= 0, at_upper)
        lb_mask = np.where(pos, at_upper, alpha <= 0)
        ub = yG[ub_mask].min() if ub_mask.any() else np.inf
        lb = yG[lb_mask].max() if lb_mask.any() else -np.inf
        if np.isinf(ub):
            rho = float(lb)
        elif np.isinf(lb):
            rho = float(ub)
        else:
            rho = 0.5 * float(ub + lb)
    return -rho


def kkt_violations(alpha, bias, y, K, C) -> np.ndarray:
    """Per-multiplier KKT violation of the soft-margin conditions."""
    yf = y * (K @ (alpha * y) + bias)
    at_zero = alpha <= 0
    at_c = alpha >= C
    free = ~(at_zero | at_c)
    v = np.zeros_like(alpha)
    v[at_zero] = np.maximum(0.0, 1 - yf[at_zero])
    v[at_c] = np.maximum(0.0, yf[at_c] - 1)
    v[free] = np.abs(yf[free] - 1)
    return v


@dataclass
class PairMachine:
    first: int
    second: int
    weights: np.ndarray | None  # None for a constant voter
    bias: float
    constant: int | None = None

    def votes_first(self, X) -> np.ndarray:
        """True where the machine votes for ``first``."""
        if self.constant is not None:
            return np.full(X.shape[0], self.constant == self.first)
        # the first class of a pair carries label +1
        return (X @ self.weights + self.bias) >= 0

    def to_dict(self):
        return {
            "first": self.first,
            "second": self.second,
            "weights": None if self.weights is None else self.weights.tolist(),
            "bias": self.bias,
            "constant": self.constant,
        }

    @classmethod
    def from_dict(cls, d):
        w = None if d["weights"] is None else np.asarray(d["weights"], dtype=float)
        return cls(d["first"], d["second"], w, d["bias"], d["constant"])


@dataclass
class SMOPayload:
    n_classes: int
    means: np.ndarray  # per raw predictor, used for missing values
    nominal_sizes: dict[int, int]
    machines: list[PairMachine] = field(default_factory=list)

    def encode(self, X) -> sp.csr_matrix:
        return _encode(X, self.means, self.nominal_sizes)

    def predict_proba(self, X):
        Z = self.encode(X)
        votes = np.zeros((Z.shape[0], self.n_classes))
        for m in self.machines:
            first = m.votes_first(Z)
            votes[first, m.first] += 1
            votes[~first, m.second] += 1
        return votes / max(len(self.machines), 1)

    def decision_values(self, X) -> np.ndarray:
        Z = self.encode(X)
        return np.column_stack([
            Z @ m.weights + m.bias if m.weights is not None else np.full(Z.shape[0], np.nan)
            for m in self.machines
        ])

    def to_dict(self):
        return {
            "n_classes": self.n_classes,
            "means": self.means.tolist(),
            "nominal_sizes": {str(k): v for k, v in sorted(self.nominal_sizes.items())},
            "machines": [m.to_dict() for m in self.machines],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            d["n_classes"],
            np.asarray(d["means"], dtype=float),
            {int(k): v for k, v in d["nominal_sizes"].items()},
            [PairMachine.from_dict(m) for m in d["machines"]],
        )


def _column_means(X: sp.csr_matrix) -> np.ndarray:
    """Column means ignoring NaN cells; all-missing columns get 0."""
    X = X.tocsc()
    n, p = X.shape
    col_of = np.repeat(np.arange(p), np.diff(X.indptr))
    nan = np.isnan(X.data)
    sums = np.bincount(col_of[~nan], weights=X.data[~nan], minlength=p)
    observed = n - np.bincount(col_of[nan], minlength=p)
    return np.divide(sums, observed, out=np.zeros(p), where=observed > 0)


def _encode(X, means, nominal_sizes) -> sp.csr_matrix:
    X = sp.csr_matrix(X, dtype=float, copy=True)
    if X.nnz and np.isnan(X.data).any():
        cols = X.indices
        nan = np.isnan(X.data)
        X.data[nan] = means[cols[nan]]
        X.eliminate_zeros()
    if not nominal_sizes:
        return X
    # numeric columns keep their place; each nominal column becomes one indicator per value
    p = X.shape[1]
    offset = np.zeros(p + 1, dtype=np.int64)
    widths = np.ones(p, dtype=np.int64)
    for j, size in nominal_sizes.items():
        widths[j] = size
    offset[1:] = np.cumsum(widths)
    coo = X.tocoo()
    rows, cols, vals = list(coo.row), list(coo.col), list(coo.data)
    out_r, out_c, out_v = [], [], []
    nz_rows = {}
    for r, c, v in zip(rows, cols, vals):
        if c in nominal_sizes:
            code = int(round(v))
            code = min(max(code, 0), nominal_sizes[c] - 1)
            out_r.append(r)
            out_c.append(offset[c] + code)
            out_v.append(1.0)
            nz_rows.setdefault(c, set()).add(r)
        else:
            out_r.append(r)
            out_c.append(offset[c])
            out_v.append(v)
    # implicit zeros in a nominal column mean value index 0
    for c in nominal_sizes:
        seen = nz_rows.get(c, set())
        for r in range(X.shape[0]):
            if r not in seen:
                out_r.append(r)
                out_c.append(offset[c])
                out_v.append(1.0)
    return sp.csr_matrix((out_v, (out_r, out_c)), shape=(X.shape[0], int(offset[-1])))


def train_smo(X, y, n_classes, params=None, rng=None, nominal=None) -> SMOPayload:
    params = params or {}
    C = params.get("C", 1.0)
    tol = params.get("tolerance", 1e-3)
    gap_tol = params.get("gap_tolerance", 1e-7)
    max_iter = int(params.get("max_iter", 1_000_000))
    nominal = dict(nominal or {})
    X = sp.csr_matrix(X, dtype=float)
    means = _column_means(X)
    # nominal missing cells take the modal value rather than the mean code
    for j in nominal:
        col = X.getcol(j).toarray().ravel()
        obs = col[~np.isnan(col)].astype(int)
        means[j] = float(np.bincount(obs, minlength=nominal[j]).argmax()) if obs.size else 0.0
    Z = _encode(X, means, nominal)
    payload = SMOPayload(n_classes, means, nominal)
    for a in range(n_classes):
        for b in range(a + 1, n_classes):
            ia = np.flatnonzero(y == a)
            ib = np.flatnonzero(y == b)
            if ia.size == 0 or ib.size == 0:
                winner = a if ia.size or not ib.size else b
                payload.machines.append(PairMachine(a, b, None, 0.0, constant=winner))
                continue
            idx = np.concatenate([ia, ib])
            yy = np.concatenate([np.ones(ia.size), -np.ones(ib.size)])
            Zp = Z[idx]
            sol = smo_solve_binary(Zp, yy, C, tol, max_iter, gap_tolerance=gap_tol)
            w = np.asarray(Zp.T @ (sol.alpha * yy)).ravel()
            payload.machines.append(PairMachine(a, b, w, sol.bias))
    return payload
