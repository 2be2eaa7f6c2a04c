"""Regularized linear classifiers.

Four losses are supported, all with an L2 penalty ``lam * ||W||^2`` on the
weights and an unpenalized bias:

* ``logistic``       one-vs-rest binary logistic regression
* ``multinomial``    softmax cross-entropy
* ``hinge``          one-vs-rest L1-hinge SVM
* ``crammer_singer`` joint multiclass hinge

The data term is the class-weighted mean of the per-sample losses,
normalized by the total sample weight (which equals N for uniform or
balanced weights).

Logistic models are fit with L-BFGS on the smooth primal.  The SVMs are
fit in the dual by coordinate descent; the bias equality constraints of the
dual are handled with an augmented Lagrangian whose multipliers are the
biases themselves.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
import numba
import numpy as np
import scipy.sparse as sp
from scipy.optimize import minimize

__all__ = [
    "ConvergenceError",
    "LinearModel",
    "balanced_weights",
    "ordered_classes",
    "train_logreg",
    "train_svm",
    "objective",
]

LOSSES = ("logistic", "hinge", "crammer_singer", "multinomial")


class ConvergenceError(RuntimeError):
    """Raised when a solver hits its iteration cap before meeting ``tol``."""

    def __init__(self, message, grad_norm):
        super().__init__(f"{message} (final gradient norm / gap {grad_norm:.3e})")
        self.grad_norm = grad_norm


def ordered_classes(labels):
    """Distinct labels in declaration order for enums, sorted otherwise."""
    uniq = set(labels)
    first = next(iter(uniq)) if uniq else None
    if isinstance(first, enum.Enum):
        return tuple(m for m in type(first) if m in uniq)
    return tuple(sorted(uniq))


def balanced_weights(labels) -> dict:
    """Inverse-frequency class weights ``N / (C * n_c)``."""
    labels = list(labels)
    if not labels:
        raise ValueError("cannot balance an empty label list")
    classes = ordered_classes(labels)
    counts = {c: 0 for c in classes}
    for lab in labels:
        counts[lab] += 1
    n, k = len(labels), len(classes)
    return {c: n / (k * counts[c]) for c in classes}


def _as_csr(X):
    if sp.issparse(X):
        X = sp.csr_matrix(X, dtype=np.float64)
    else:
        X = sp.csr_matrix(np.atleast_2d(np.asarray(X, dtype=np.float64)))
    X.sum_duplicates()
    X.sort_indices()
    return X


def _encode(y, classes):
    if classes is None:
        classes = ordered_classes(y)
    classes = tuple(classes)
    if len(classes) < 2:
        raise ValueError("need at least two classes to train a classifier")
    index = {c: i for i, c in enumerate(classes)}
    try:
        yi = np.fromiter((index[v] for v in y), dtype=np.int64, count=len(y))
    except KeyError as exc:
        raise ValueError(f"label {exc.args[0]!r} not among classes {classes}") from None
    missing = set(range(len(classes))) - set(yi.tolist())
    if missing:
        raise ValueError(f"classes {[classes[m] for m in sorted(missing)]} have no samples")
    return classes, yi


def _sample_weights(yi, classes, class_weight):
    if class_weight is None:
        return np.ones(len(yi))
    if isinstance(class_weight, str):
        if class_weight != "balanced":
            raise ValueError(f"unknown class_weight {class_weight!r}")
        cw = balanced_weights([classes[i] for i in yi])
    else:
        cw = class_weight
    per_class = np.array([float(cw.get(c, 1.0)) for c in classes])
    if np.any(per_class <= 0):
        raise ValueError("class weights must be positive")
    return per_class[yi]


@dataclass(frozen=True, eq=False)
class LinearModel:
    """Per-class weight rows plus biases.

    Binary ``logistic``/``hinge`` models keep a single row scoring
    ``classes[1]``; their decision vector is ``(-s, s)``.
    """

    classes: tuple
    W: np.ndarray
    b: np.ndarray
    loss: str
    lam: float
    n_iter: int = 0
    objective: float = float("nan")
    history: tuple = field(default=(), repr=False)

    def __post_init__(self):
        if self.loss not in LOSSES:
            raise ValueError(f"unknown loss {self.loss!r}")
        if len(self.classes) < 2:
            raise ValueError("a LinearModel needs at least two classes")
        if self.W.ndim != 2 or self.W.shape[0] != self.b.shape[0]:
            raise ValueError("W must be (rows, d) with one bias per row")
        if not (np.all(np.isfinite(self.W)) and np.all(np.isfinite(self.b))):
            raise ValueError("non-finite weights")

    @property
    def n_features(self):
        return self.W.shape[1]

    @property
    def single_row(self):
        return self.W.shape[0] == 1

    def decision_function(self, X):
        """Class scores ``W x + b``, shape (n, C)."""
        X = _check_X(X, self.n_features)
        s = np.asarray(X @ self.W.T) + self.b
        if self.single_row:
            s = np.hstack([-s, s])
        return s

    def predict_index(self, X):
        # np.argmax returns the first maximum, i.e. class-order tie-break
        return np.argmax(self.decision_function(X), axis=1)

    def predict(self, X):
        return [self.classes[i] for i in self.predict_index(X)]

    def predict_proba(self, X):
        if self.loss in ("hinge", "crammer_singer"):
            raise TypeError(
                "SVM scores are not probabilities; wrap the model with "
                "tweetsent.calibrate.calibrate_multiclass first"
            )
        s = self.decision_function(X)
        if self.loss == "multinomial":
            return _softmax(s)
        p = _sigmoid(s)
        return p / p.sum(axis=1, keepdims=True)


def _check_X(X, d):
    if not sp.issparse(X):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != d:
        raise ValueError(f"dimension mismatch: model has {d} features, input has {X.shape[1]}")
    return X


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def _softmax(s):
    z = s - s.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _logsumexp(s):
    m = s.max(axis=1, keepdims=True)
    return (m + np.log(np.exp(s - m).sum(axis=1, keepdims=True)))[:, 0]


# -- objectives --------------------------------------------------------------

def _targets_ovr(yi, n_rows):
    """+1/-1 targets, one column per weight row."""
    if n_rows == 1:
        return np.where(yi == 1, 1.0, -1.0)[:, None]
    T = -np.ones((len(yi), n_rows))
    T[np.arange(len(yi)), yi] = 1.0
    return T


def objective(loss, W, b, X, yi, sw, lam):
    """Objective value and (sub)gradient ``(f, dW, db)``.

    ``yi`` holds class indices, ``sw`` per-sample weights.  For binary
    ``logistic``/``hinge`` pass a single-row ``W``.
    """
    X = _as_csr(X) if sp.issparse(X) else np.asarray(X, dtype=np.float64)
    total = sw.sum()
    S = np.asarray(X @ W.T) + b
    n = len(yi)
    if loss == "logistic":
        T = _targets_ovr(yi, W.shape[0])
        m = T * S
        # log(1 + exp(-m)) stably
        data = np.logaddexp(0.0, -m)
        dS = -T * _sigmoid(-m)
    elif loss == "hinge":
        T = _targets_ovr(yi, W.shape[0])
        m = 1.0 - T * S
        data = np.maximum(m, 0.0)
        dS = np.where(m > 0, -T, 0.0)
    elif loss == "multinomial":
        data = (_logsumexp(S) - S[np.arange(n), yi])[:, None]
        dS = _softmax(S)
        dS[np.arange(n), yi] -= 1.0
    elif loss == "crammer_singer":
        E = np.ones_like(S)
        E[np.arange(n), yi] = 0.0
        M = E + S - S[np.arange(n), yi][:, None]
        j = np.argmax(M, axis=1)
        data = M[np.arange(n), j][:, None]
        dS = np.zeros_like(S)
        active = j != yi
        rows = np.nonzero(active)[0]
        dS[rows, j[rows]] += 1.0
        dS[rows, yi[rows]] -= 1.0
    else:
        raise ValueError(f"unknown loss {loss!r}")
    wdS = dS * (sw / total)[:, None]
    f = float((data.sum(axis=1) * sw).sum() / total + lam * np.sum(W * W))
    gW = np.asarray(X.T @ wdS).T + 2.0 * lam * W
    gb = wdS.sum(axis=0)
    return f, gW, gb


# -- logistic regression ----------------------------------------------------

def train_logreg(X, y, lam, mode="ovr", class_weight=None, *, classes=None,
                 tol=1e-6, max_iter=1000):
    """Fit L2-regularized logistic regression with L-BFGS.

    ``mode`` is ``"ovr"`` (independent sigmoid per class) or
    ``"multinomial"`` (softmax).  Raises :class:`ConvergenceError` when the
    iteration cap is hit with the projected gradient still above ``tol``.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    if mode not in ("ovr", "multinomial"):
        raise ValueError(f"unknown logistic mode {mode!r}")
    X = _as_csr(X)
    if X.shape[0] != len(y):
        raise ValueError("X and y have different lengths")
    classes, yi = _encode(y, classes)
    sw = _sample_weights(yi, classes, class_weight)
    loss = "multinomial" if mode == "multinomial" else "logistic"
    rows = 1 if (loss == "logistic" and len(classes) == 2) else len(classes)
    # columns no sample touches keep a zero weight; optimize over the rest only
    used = np.unique(X.indices)
    full_d, X = X.shape[1], X[:, used]
    d = X.shape[1]
    history = []

    def fun(theta):
        W = theta[: rows * d].reshape(rows, d)
        b = theta[rows * d:]
        f, gW, gb = objective(loss, W, b, X, yi, sw, lam)
        return f, np.concatenate([gW.ravel(), gb])

    def record(theta):
        history.append(fun(theta)[0])

    theta0 = np.zeros(rows * (d + 1))
    history.append(fun(theta0)[0])
    res = minimize(fun, theta0, jac=True, method="L-BFGS-B", callback=record,
                   options={"maxiter": max_iter, "ftol": tol * 1e-6, "gtol": tol * 1e-2,
                            "maxcor": 20})
    gnorm = float(np.abs(res.jac).max())
    if not res.success and gnorm > tol:
        raise ConvergenceError(f"logistic regression did not converge: {res.message}", gnorm)
    W = np.zeros((rows, full_d))
    W[:, used] = res.x[: rows * d].reshape(rows, d)
    b = res.x[rows * d:].copy()
    return LinearModel(classes, W, b, loss, float(lam), int(res.nit), float(res.fun), tuple(history))


# -- SVM dual coordinate descent --------------------------------------------

@numba.njit(cache=True)
def _hinge_epoch(indptr, indices, data, sqnorm, t, C, alpha, w, b, h, rho, order):
    biggest = 0.0
    for i in order:
        s = 0.0
        for p in range(indptr[i], indptr[i + 1]):
            s += w[indices[p]] * data[p]
        g = t[i] * (s + b + rho * h) - 1.0
        new = alpha[i] - g / (sqnorm[i] + rho)
        if new < 0.0:
            new = 0.0
        elif new > C[i]:
            new = C[i]
        delta = new - alpha[i]
        if abs(delta) > biggest:
            biggest = abs(delta)
        if delta != 0.0:
            alpha[i] = new
            step = delta * t[i]
            for p in range(indptr[i], indptr[i + 1]):
                w[indices[p]] += step * data[p]
            h += step
    return h, biggest


@numba.njit(cache=True)
def _cs_epoch(indptr, indices, data, sqnorm, y, C, alpha, W, b, h, rho, order):
    K = W.shape[1]
    biggest = 0.0
    G = np.empty(K)
    B = np.empty(K)
    tt = np.empty(K)
    v = np.empty(K)
    for i in order:
        for m in range(K):
            G[m] = b[m] + rho * h[m] + 1.0
        G[y[i]] -= 1.0
        for p in range(indptr[i], indptr[i + 1]):
            row = indices[p]
            x = data[p]
            for m in range(K):
                G[m] += W[row, m] * x
        A = sqnorm[i] + rho
        # minimize A/2 |v|^2 + B.v  s.t. sum(v) = 0, v <= C_i * e_y
        for m in range(K):
            B[m] = G[m] - A * alpha[i, m]
            tt[m] = B[m] / A
        tt[y[i]] += C[i]
        srt = np.argsort(-tt)
        acc = 0.0
        capped = C[i]
        theta = 0.0
        for r in range(1, K + 1):
            m = srt[r - 1]
            acc += B[m] / A
            if m == y[i]:
                capped -= C[i]
            theta = (acc - capped) / r
            if theta <= tt[m] and (r == K or theta >= tt[srt[r]]):
                break
        changed = False
        for m in range(K):
            u = C[i] if m == y[i] else 0.0
            val = theta - B[m] / A
            v[m] = (val if val < u else u) - alpha[i, m]
            if v[m] != 0.0:
                changed = True
                if abs(v[m]) > biggest:
                    biggest = abs(v[m])
        if changed:
            for m in range(K):
                alpha[i, m] += v[m]
                h[m] += v[m]
            for p in range(indptr[i], indptr[i + 1]):
                row = indices[p]
                x = data[p]
                for m in range(K):
                    W[row, m] += v[m] * x
    return biggest


_POLISH_MAX = 600   # largest working-set QP (variables) solved directly
_POLISH_EVERY = 5
_POLISH_FORCE = 50  # try even a moving face this often; large C keeps faces churning
_NEAR_MARGIN = 0.1
_POLISH_ROUNDS = 20
_KKT_TOL = 1e-9


def _best_bias(s, t, C):
    """Exact minimizer over b of sum_i C_i * max(0, 1 - t_i (s_i + b)).

    When the loss is flat on an interval of minimizers, its midpoint is
    returned; an end point would push every score to one side.
    """
    knots = t - s
    order = np.argsort(knots, kind="stable")
    flat = 1e-12 * C.sum()
    # slope left of every knot is -sum(C over t=+1); each knot adds C_i
    slope = -C[t > 0].sum()
    for pos, i in enumerate(order):
        slope += C[i]
        if slope >= -flat:
            if slope <= flat and pos + 1 < len(order):
                return 0.5 * float(knots[i] + knots[order[pos + 1]])
            return float(knots[i])
    return float(knots[order[-1]])


def _qp(P, q, upper, A, b, lower=None):
    """min 1/2 x'Px + q'x  s.t.  lower <= x <= upper, Ax = b; returns (x, y) or None."""
    from cvxopt import matrix, solvers, spmatrix

    n = len(q)
    # box rows are diagonal; a sparse G keeps the KKT factorization at O(n^3) once
    rows, vals, h = np.arange(n), np.ones(n), upper
    if lower is not None:
        rows, vals = np.concatenate([rows, rows + n]), np.concatenate([vals, -vals])
        h = np.concatenate([upper, -lower])
    cols = np.tile(np.arange(n), len(rows) // n)
    G = spmatrix(vals.tolist(), rows.tolist(), cols.tolist(), (len(rows), n))
    sol = solvers.qp(matrix(P), matrix(q), G, matrix(h), matrix(A), matrix(b),
                     options={"show_progress": False, "abstol": 1e-12, "reltol": 1e-12,
                              "feastol": 1e-12, "maxiters": 200})
    if sol["x"] is None:
        return None
    return np.array(sol["x"]).ravel(), np.array(sol["y"]).ravel()


def _hinge_polish(X, t, C, alpha, margin):
    """Solve the dual exactly by working-set decomposition.

    The set starts with samples that are, or nearly are, support vectors;
    all other duals stay at zero.  After each exact solve, samples outside
    the set whose margin falls below one join it, until none is left.
    Returns ``None`` when the set outgrows ``_POLISH_MAX`` or a QP fails;
    the caller checks global optimality through the duality gap.
    """
    in_work = (alpha > 0.0) | (margin <= 1.0 + _NEAR_MARGIN)
    new = None
    for _ in range(_POLISH_ROUNDS):
        work = np.nonzero(in_work)[0]
        if len(work) == 0 or len(work) > _POLISH_MAX:
            return None
        Xw = X[work]
        tw = t[work]
        P = np.asarray((Xw @ Xw.T).todense()) * np.outer(tw, tw)
        out = _qp(P, -np.ones(len(work)), C[work], tw[None, :], np.zeros(1),
                  lower=np.zeros(len(work)))
        if out is None:
            return None
        new = np.zeros_like(alpha)
        new[work] = np.clip(out[0], 0.0, C[work])
        # the equality multiplier is the bias
        margin = t * (X @ np.asarray(X.T @ (new * t)).ravel() + out[1][0])
        violated = ~in_work & (margin < 1.0 - _KKT_TOL)
        if not violated.any():
            break
        in_work |= violated
    return new


def _hinge_binary(X, sqnorm, t, C, rho, tol, max_iter, rng, lam_scale):
    """Solve one binary L1-hinge problem; returns (w, b, epochs, history)."""
    n, d = X.shape
    alpha = np.zeros(n)
    w = np.zeros(d)
    b, h = 0.0, 0.0
    best = (np.inf, w.copy(), 0.0)
    history = []
    last_face, tried = None, set()

    def primal_of(w):
        s = X @ w
        bias = _best_bias(s, t, C)
        return 0.5 * w @ w + C @ np.maximum(0.0, 1.0 - t * (s + bias)), bias

    for epoch in range(1, max_iter + 1):
        h, _ = _hinge_epoch(X.indptr, X.indices, X.data, sqnorm, t, C, alpha, w, b, h, rho,
                            rng.permutation(n))
        b += rho * h
        primal, bias = primal_of(w)
        if primal < best[0]:
            best = (primal, w.copy(), bias)
        dual = alpha.sum() - 0.5 * w @ w
        feasible = abs(h) <= tol * max(1.0, alpha.sum())
        if epoch % _POLISH_EVERY == 0:
            face = (alpha > 0.0).tobytes() + (alpha >= C).tobytes()
            polished = None
            if face not in tried and (face == last_face or epoch % _POLISH_FORCE == 0):
                tried.add(face)
                polished = _hinge_polish(X, t, C, alpha, t * (X @ w + b))
            last_face = face
            if polished is not None:
                pa = polished
                pw = np.asarray(X.T @ (pa * t)).ravel()
                pprimal, pbias = primal_of(pw)
                pdual = pa.sum() - 0.5 * pw @ pw
                if pprimal < best[0]:
                    best = (pprimal, pw.copy(), pbias)
                if abs(pa @ t) <= tol * max(1.0, pa.sum()) and pprimal - pdual <= tol * pprimal:
                    dual, feasible = max(dual, pdual), True
        history.append(best[0] * lam_scale)
        gap = (best[0] - dual) / max(best[0], 1e-300)
        if gap <= tol and feasible:
            return best[1], best[2], epoch, history
    raise ConvergenceError("hinge SVM did not converge", gap)


def _cs_polish(X, yi, E, U, alpha, G):
    """Crammer-Singer counterpart of :func:`_hinge_polish`.

    ``G`` holds the current ``s_m(x_i) + b_m + e_im``.  A sample outside the
    working set violates optimality when a rival class scores above its own.
    Returns the duals and biases, or ``None``.
    """
    n, K = U.shape
    rows = np.arange(n)
    rival = np.where(E > 0, G, -np.inf).max(axis=1)
    in_work = (alpha != 0.0).any(axis=1) | (rival >= G[rows, yi] - _NEAR_MARGIN)
    result = None
    for _ in range(_POLISH_ROUNDS):
        work = np.nonzero(in_work)[0]
        nv = len(work) * K
        if len(work) == 0 or nv > _POLISH_MAX:
            return None
        Xw = X[work]
        P = np.kron(np.asarray((Xw @ Xw.T).todense()), np.eye(K))
        A = np.zeros((len(work) + K - 1, nv))
        for r in range(len(work)):
            A[r, r * K:(r + 1) * K] = 1.0
        for m in range(K - 1):   # the last class sum is implied by the others
            A[len(work) + m, m::K] = 1.0
        out = _qp(P, E[work].ravel(), U[work].ravel(), A, np.zeros(len(A)))
        if out is None:
            return None
        new = np.zeros_like(alpha)
        new[work] = np.minimum(out[0].reshape(-1, K), U[work])
        bias = np.append(out[1][len(work):], 0.0)
        result = new, bias
        G = np.asarray(X @ np.asarray(X.T @ new)) + bias + E
        rival = np.where(E > 0, G, -np.inf).max(axis=1)
        violated = ~in_work & (rival > G[rows, yi] + _KKT_TOL)
        if not violated.any():
            break
        in_work |= violated
    return result


def _crammer_singer(X, sqnorm, yi, K, C, rho, tol, max_iter, rng, lam_scale):
    n, d = X.shape
    alpha = np.zeros((n, K))
    Wt = np.zeros((d, K))
    b = np.zeros(K)
    h = np.zeros(K)
    rows = np.arange(n)
    E = np.ones((n, K))
    E[rows, yi] = 0.0
    U = np.zeros((n, K))
    U[rows, yi] = C
    best = (np.inf, Wt.copy(), b.copy())
    history = []
    last_face, tried = None, set()

    def values(Wt, b, alpha):
        S = np.asarray(X @ Wt) + b
        half_norm = 0.5 * np.sum(Wt * Wt)
        primal = half_norm + C @ (E + S - S[rows, yi][:, None]).max(axis=1)
        return primal, -(half_norm + np.sum(E * alpha))

    for epoch in range(1, max_iter + 1):
        _cs_epoch(X.indptr, X.indices, X.data, sqnorm, yi, C, alpha, Wt, b, h, rho,
                  rng.permutation(n))
        b += rho * h
        primal, dual = values(Wt, b, alpha)
        if primal < best[0]:
            best = (primal, Wt.copy(), b.copy())
        feasible = np.abs(h).max() <= tol * max(1.0, C.sum())
        if epoch % _POLISH_EVERY == 0:
            face = (alpha < U).tobytes()
            polished = None
            if face not in tried and (face == last_face or epoch % _POLISH_FORCE == 0):
                tried.add(face)
                polished = _cs_polish(X, yi, E, U, alpha, np.asarray(X @ Wt) + b + E)
            last_face = face
            if polished is not None:
                pa, pb = polished
                pW = np.asarray(X.T @ pa)
                pprimal, pdual = values(pW, pb, pa)
                sums = max(np.abs(pa.sum(axis=0)).max(), np.abs(pa.sum(axis=1)).max())
                if pprimal < best[0]:
                    best = (pprimal, pW.copy(), pb.copy())
                if sums <= tol * max(1.0, C.sum()) and pprimal - pdual <= tol * pprimal:
                    dual, feasible = max(dual, pdual), True
        history.append(best[0] * lam_scale)
        gap = (best[0] - dual) / max(best[0], 1e-300)
        if gap <= tol and feasible:
            return np.ascontiguousarray(best[1].T), best[2], epoch, history
    raise ConvergenceError("Crammer-Singer SVM did not converge", gap)


def train_svm(X, y, lam, mode="ovr", class_weight=None, *, classes=None,
              tol=1e-6, max_iter=1000, seed=0, rho=None):
    """Fit an L2-regularized linear SVM by dual coordinate descent.

    ``mode="ovr"`` trains one L1-hinge machine per class (one in the binary
    case); ``mode="crammer_singer"`` trains the joint multiclass machine.

    Each epoch visits every sample once in an order drawn from ``seed`` and
    then takes a multiplier step on the bias.  The best primal iterate seen
    so far is kept, so ``history`` (its objective per epoch) never
    increases.  Training stops once the relative duality gap and the
    relative bias-constraint violation are both below ``tol``.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    if mode not in ("ovr", "crammer_singer"):
        raise ValueError(f"unknown SVM mode {mode!r}")
    X = _as_csr(X)
    if X.shape[0] != len(y):
        raise ValueError("X and y have different lengths")
    classes, yi = _encode(y, classes)
    sw = _sample_weights(yi, classes, class_weight)
    # lam*|W|^2 + sum(sw*loss)/sum(sw)  ==  2*lam * (|W|^2/2 + sum(C*loss))
    C = sw / (2.0 * lam * sw.sum())
    lam_scale = 2.0 * lam
    sqnorm = np.asarray(X.multiply(X).sum(axis=1)).ravel()
    if rho is None:
        rho = 0.1 * max(float(sqnorm.mean()), 1e-12)
    rng = np.random.default_rng(seed)
    if mode == "crammer_singer":
        W, b, n_iter, history = _crammer_singer(X, sqnorm, yi, len(classes), C, rho, tol,
                                                max_iter, rng, lam_scale)
        loss = "crammer_singer"
    else:
        T = _targets_ovr(yi, 1 if len(classes) == 2 else len(classes))
        W = np.zeros((T.shape[1], X.shape[1]))
        b = np.zeros(T.shape[1])
        n_iter, history = 0, None
        for k in range(T.shape[1]):
            W[k], b[k], epochs, hist = _hinge_binary(X, sqnorm, np.ascontiguousarray(T[:, k]),
                                                     C, rho, tol, max_iter, rng, lam_scale)
            n_iter = max(n_iter, epochs)
            history = hist if history is None else _sum_histories(history, hist)
        loss = "hinge"
    f = objective(loss, W, b, X, yi, sw, lam)[0]
    return LinearModel(classes, W, np.asarray(b, dtype=float).copy(), loss, float(lam),
                       n_iter, f, tuple(history))


def _sum_histories(a, b):
    n = max(len(a), len(b))
    a = list(a) + [a[-1]] * (n - len(a))
    b = list(b) + [b[-1]] * (n - len(b))
    return [x + y for x, y in zip(a, b)]
