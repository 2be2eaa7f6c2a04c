"""Turning classifier scores into probabilities.

Platt scaling fits ``p(f) = 1 / (1 + exp(A f + B))``; isotonic regression
fits a non-decreasing map by pool-adjacent-violators.  Multiclass models
get one such map per class (one-vs-rest) and the outputs are renormalized.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linear import LinearModel

__all__ = [
    "PlattParams",
    "IsotonicMap",
    "CalibratedModel",
    "platt_fit",
    "pav",
    "isotonic_fit",
    "calibrate_multiclass",
    "native",
]

METHODS = ("platt", "isotonic", "native")


def _binary_inputs(scores, labels):
    f = np.asarray(scores, dtype=float).ravel()
    y = np.asarray(labels).astype(bool).ravel()
    if f.shape != y.shape:
        raise ValueError("scores and labels differ in length")
    if not np.all(np.isfinite(f)):
        raise ValueError("scores must be finite")
    if y.all() or not y.any():
        raise ValueError("calibration needs both classes")
    return f, y


@dataclass(frozen=True)
class PlattParams:
    A: float
    B: float

    def __call__(self, f):
        z = self.A * np.asarray(f, dtype=float) + self.B
        # 1 / (1 + e^z) without overflow
        return np.where(z >= 0, np.exp(-np.abs(z)) / (1.0 + np.exp(-np.abs(z))),
                        1.0 / (1.0 + np.exp(-np.abs(z))))


def platt_fit(scores, labels, *, tol=1e-8, max_iter=100) -> PlattParams:
    """Maximum-likelihood sigmoid on smoothed targets.

    Targets are ``(N+ + 1) / (N+ + 2)`` for positives and ``1 / (N- + 2)``
    for negatives.  Newton's method with backtracking on the mean negative
    log-likelihood; stops when its gradient norm drops below ``tol``.
    """
    f, y = _binary_inputs(scores, labels)
    n_pos, n_neg = int(y.sum()), int((~y).sum())
    t = np.where(y, (n_pos + 1.0) / (n_pos + 2.0), 1.0 / (n_neg + 2.0))
    n = len(f)

    def nll(A, B):
        z = A * f + B
        # -[t log p + (1-t) log(1-p)] with p = 1/(1+e^z)
        return np.mean(np.logaddexp(0.0, z) - (1.0 - t) * z)

    A, B = 0.0, np.log((n_neg + 1.0) / (n_pos + 1.0))
    fval = nll(A, B)
    for _ in range(max_iter):
        p = PlattParams(A, B)(f)
        r = t - p                       # d nll / dz = (1 - p) - (1 - t)
        g = np.array([r @ f, r.sum()]) / n
        if np.hypot(*g) < tol:
            return PlattParams(float(A), float(B))
        q = p * (1.0 - p)
        H = np.array([[q @ (f * f), q @ f], [q @ f, q.sum()]]) / n
        H[np.diag_indices(2)] += 1e-12
        step = np.linalg.solve(H, -g)
        size = 1.0
        while size > 1e-10:
            A2, B2 = A + size * step[0], B + size * step[1]
            f2 = nll(A2, B2)
            if f2 <= fval + 1e-4 * size * (g @ step):
                break
            size *= 0.5
        else:
            break
        A, B, fval = A2, B2, f2
    p = PlattParams(A, B)(f)
    g = np.array([(t - p) @ f, (t - p).sum()]) / n
    if np.hypot(*g) >= tol:
        raise RuntimeError(f"Platt fit did not converge (gradient norm {np.hypot(*g):.2e})")
    return PlattParams(float(A), float(B))


def pav(y, w=None):
    """Weighted least-squares non-decreasing fit of the sequence ``y``."""
    y = np.asarray(y, dtype=float)
    w = np.ones_like(y) if w is None else np.asarray(w, dtype=float)
    values, weights, sizes = [], [], []
    for yi, wi in zip(y, w):
        values.append(yi)
        weights.append(wi)
        sizes.append(1)
        while len(values) > 1 and values[-2] > values[-1]:
            v, ww, s = values.pop(), weights.pop(), sizes.pop()
            tot = weights[-1] + ww
            values[-1] = (values[-1] * weights[-1] + v * ww) / tot
            weights[-1] = tot
            sizes[-1] += s
    return np.repeat(values, sizes)


@dataclass(frozen=True)
class IsotonicMap:
    """Piecewise-linear non-decreasing map, constant beyond its end points."""

    x: np.ndarray
    p: np.ndarray

    def __call__(self, f):
        return np.interp(np.asarray(f, dtype=float), self.x, self.p)


def isotonic_fit(scores, labels) -> IsotonicMap:
    """Isotonic regression of binary labels on scores.

    Ties in score are pooled first.  The map keeps both end points of every
    fitted block, so it is flat across a block and linear between blocks.
    """
    f, y = _binary_inputs(scores, labels)
    if len(f) < 2:
        raise ValueError("isotonic calibration needs at least two samples")
    xs, inv, counts = np.unique(f, return_inverse=True, return_counts=True)
    means = np.bincount(inv, weights=y.astype(float)) / counts
    fitted = np.clip(pav(means, counts), 0.0, 1.0)
    # block boundaries: keep the first and last x of each run of equal values
    keep = np.ones(len(xs), dtype=bool)
    if len(xs) > 2:
        same_prev = fitted[1:-1] == fitted[:-2]
        same_next = fitted[1:-1] == fitted[2:]
        keep[1:-1] = ~(same_prev & same_next)
    return IsotonicMap(xs[keep], fitted[keep])


@dataclass(frozen=True, eq=False)
class CalibratedModel:
    """A linear model with per-class score-to-probability maps.

    ``maps`` is empty for ``method="native"`` (logistic models).  A binary
    model has one map for ``classes[1]`` and ``p0 = 1 - p1``.
    """

    base: LinearModel
    method: str
    maps: tuple = ()

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown calibration method {self.method!r}")

    @property
    def classes(self):
        return self.base.classes

    @property
    def n_features(self):
        return self.base.n_features

    def predict_proba(self, X):
        if self.method == "native":
            return self.base.predict_proba(X)
        return self.proba_from_scores(self.base.decision_function(X))

    def proba_from_scores(self, S):
        S = np.atleast_2d(S)
        if len(self.maps) == 1:
            p1 = np.clip(self.maps[0](S[:, 1]), 0.0, 1.0)
            return np.column_stack([1.0 - p1, p1])
        P = np.column_stack([m(S[:, k]) for k, m in enumerate(self.maps)])
        P = np.clip(P, 0.0, 1.0)
        total = P.sum(axis=1, keepdims=True)
        uniform = np.full_like(P, 1.0 / P.shape[1])
        return np.where(total > 0, P / np.where(total > 0, total, 1.0), uniform)

    def predict_index(self, X):
        return np.argmax(self.predict_proba(X), axis=1)

    def predict(self, X):
        return [self.classes[i] for i in self.predict_index(X)]


def native(base: LinearModel) -> CalibratedModel:
    if base.loss not in ("logistic", "multinomial"):
        raise TypeError("only logistic models have native probabilities")
    return CalibratedModel(base, "native")


def calibrate_multiclass(base: LinearModel, method, cal_scores, cal_labels) -> CalibratedModel:
    """Fit one-vs-rest calibrators on held-out scores.

    Parameters
    ----------
    cal_scores : (n, C) array
        ``base``-style decision values for samples the scoring model did
        not train on (out-of-fold).
    cal_labels : sequence
        Gold labels of those samples.
    """
    if method == "native":
        return native(base)
    if method not in ("platt", "isotonic"):
        raise ValueError(f"unknown calibration method {method!r}")
    S = np.atleast_2d(np.asarray(cal_scores, dtype=float))
    labels = list(cal_labels)
    if S.shape != (len(labels), len(base.classes)):
        raise ValueError(f"cal_scores must have shape ({len(labels)}, {len(base.classes)})")
    missing = [c for c in base.classes if c not in set(labels)]
    if missing:
        raise ValueError(f"classes {missing} missing from calibration labels")
    fit = platt_fit if method == "platt" else isotonic_fit
    targets = base.classes[1:] if len(base.classes) == 2 else base.classes
    maps = []
    for c in targets:
        k = base.classes.index(c)
        maps.append(fit(S[:, k], [lab == c for lab in labels]))
    return CalibratedModel(base, method, tuple(maps))
