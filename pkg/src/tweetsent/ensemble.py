"""Stacked generalization over calibrated linear base learners.

Every base learner produces class probabilities.  The second-level model
is a Crammer-Singer SVM with balanced class weights trained on the
out-of-fold probabilities of all bases, concatenated in base order.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .calibrate import CalibratedModel, calibrate_multiclass
from .evalq import MEASURES, score
from .linear import ConvergenceError, LinearModel, ordered_classes, train_logreg, train_svm

__all__ = [
    "BaseSpec",
    "DEFAULT_BASES",
    "FoldError",
    "OOFResult",
    "StackedModel",
    "stratified_folds",
    "fit_base",
    "oof_probabilities",
    "audit_no_leakage",
    "train_meta",
    "train_stack",
    "stack_predict",
    "META_LAMBDAS",
]

META_LAMBDAS = tuple(10.0 ** k for k in range(-4, 3))


class FoldError(ValueError):
    """A training split lacks a class; re-seed or use fewer folds."""


@dataclass(frozen=True)
class BaseSpec:
    """One base learner.

    ``learner`` is ``"svm"`` (modes ``ovr``/``crammer_singer``) or
    ``"logreg"`` (modes ``ovr``/``multinomial``).  ``calibration`` is
    ``"platt"``/``"isotonic"`` for SVMs and ``"native"`` for logistic models;
    ``"none"`` keeps the raw linear model and cannot enter a stack.
    """

    learner: str
    mode: str
    calibration: str
    lam: float = 1e-4
    class_weight: object = "balanced"

    def __post_init__(self):
        ok = {("svm", "ovr"), ("svm", "crammer_singer"), ("logreg", "ovr"), ("logreg", "multinomial")}
        if (self.learner, self.mode) not in ok:
            raise ValueError(f"unknown base learner {self.learner}/{self.mode}")
        allowed = ("platt", "isotonic", "none") if self.learner == "svm" else ("native", "none")
        if self.calibration not in allowed:
            raise ValueError(f"calibration {self.calibration!r} does not apply to {self.learner}")
        if self.lam <= 0:
            raise ValueError("lam must be positive")

    def with_lam(self, lam):
        return BaseSpec(self.learner, self.mode, self.calibration, lam, self.class_weight)

    @property
    def name(self):
        return f"{self.learner}-{self.mode}-{self.calibration}"


DEFAULT_BASES = (
    BaseSpec("svm", "crammer_singer", "isotonic"),
    BaseSpec("svm", "crammer_singer", "platt"),
    BaseSpec("logreg", "ovr", "native"),
    BaseSpec("logreg", "multinomial", "native"),
)


def stratified_folds(y, k, seed):
    """Fold id per sample; each class is dealt round-robin after a seeded shuffle.

    Per-class fold counts differ by at most one.  Raises :class:`FoldError`
    when some training split (all folds but one) would miss a class.
    """
    y = list(y)
    n = len(y)
    if k < 2 or k > n:
        raise FoldError(f"need 2 <= k <= n_samples, got k={k}, n={n}")
    rng = np.random.default_rng(seed)
    fold = np.empty(n, dtype=np.int64)
    offset = 0
    for c in ordered_classes(y):
        idx = np.array([i for i, lab in enumerate(y) if lab == c])
        idx = idx[rng.permutation(len(idx))]
        fold[idx] = (offset + np.arange(len(idx))) % k
        offset = (offset + len(idx)) % k   # keep total fold sizes within one
    for f in range(k):
        rest = {y[i] for i in np.nonzero(fold != f)[0]}
        if len(rest) < len(set(y)):
            raise FoldError(f"training split without fold {f} misses a class; re-seed or reduce k")
    return fold


def _rows(X, idx):
    return X[idx] if sp.issparse(X) else np.asarray(X)[idx]


def _take(y, idx):
    return [y[i] for i in idx]


def _fit_linear(spec, X, y, classes, seed):
    if spec.learner == "svm":
        return train_svm(X, y, spec.lam, spec.mode, spec.class_weight, classes=classes, seed=seed)
    return train_logreg(X, y, spec.lam, spec.mode, spec.class_weight, classes=classes)


def fit_base(spec: BaseSpec, X, y, classes=None, *, k_cal=5, seed=0):
    """Train one base learner on all of ``(X, y)``.

    SVM calibrators are fit on out-of-fold decision values from ``k_cal``
    inner folds, so no calibration point is scored by a model that saw it.
    """
    y = list(y)
    classes = tuple(classes or ordered_classes(y))
    model = _fit_linear(spec, X, y, classes, seed)
    if spec.calibration == "none":
        return model
    if spec.calibration == "native":
        return CalibratedModel(model, "native")
    fold = stratified_folds(y, k_cal, seed)
    S = np.zeros((len(y), len(classes)))
    for f in range(k_cal):
        tr, te = np.nonzero(fold != f)[0], np.nonzero(fold == f)[0]
        inner = _fit_linear(spec, _rows(X, tr), _take(y, tr), classes, seed)
        S[te] = inner.decision_function(_rows(X, te))
    return calibrate_multiclass(model, spec.calibration, S, y)


@dataclass(frozen=True, eq=False)
class OOFResult:
    proba: np.ndarray          # (n, C)
    fold: np.ndarray           # fold id of each sample
    trained_on: tuple          # per fold, sorted indices the fold model was fit on
    filled: np.ndarray         # times each row was written


def oof_probabilities(X, y, spec: BaseSpec, k=5, seed=0, classes=None, fold=None) -> OOFResult:
    """Out-of-fold class probabilities of ``spec`` on ``(X, y)``.

    ``fold`` gives a precomputed fold id per sample; by default folds come
    from :func:`stratified_folds`.
    """
    y = list(y)
    classes = tuple(classes or ordered_classes(y))
    if fold is None:
        fold = stratified_folds(y, k, seed)
    else:
        fold = np.asarray(fold, dtype=np.int64)
        k = int(fold.max()) + 1
    P = np.full((len(y), len(classes)), np.nan)
    filled = np.zeros(len(y), dtype=np.int64)
    trained = []
    for f in range(k):
        tr, te = np.nonzero(fold != f)[0], np.nonzero(fold == f)[0]
        model = fit_base(spec, _rows(X, tr), _take(y, tr), classes,
                         k_cal=min(k, len(tr)), seed=seed)
        P[te] = model.predict_proba(_rows(X, te))
        filled[te] += 1
        trained.append(tr)
    return OOFResult(P, fold, tuple(trained), filled)


def audit_no_leakage(res: OOFResult):
    """Check that each row was written once by a model that never saw it."""
    if np.any(res.filled != 1):
        raise AssertionError("some out-of-fold rows were written zero or several times")
    for i, f in enumerate(res.fold):
        tr = res.trained_on[f]
        pos = np.searchsorted(tr, i)
        if pos < len(tr) and tr[pos] == i:
            raise AssertionError(f"sample {i} was in the training split of its own fold {f}")
    return True


def train_meta(Z, y, classes=None, *, lams=META_LAMBDAS, k=5, seed=0, measure="accuracy"):
    """Crammer-Singer meta model; ``lam`` chosen by ``k``-fold CV on ``Z``.

    Grid points whose solver fails to converge are skipped.  Ties go to
    the earlier grid point.
    """
    y = list(y)
    classes = tuple(classes or ordered_classes(y))
    Z = np.asarray(Z, dtype=float)
    direction = MEASURES[measure]
    fold = stratified_folds(y, k, seed)
    best = None
    for lam in lams:
        preds = [None] * len(y)
        try:
            for f in range(k):
                tr, te = np.nonzero(fold != f)[0], np.nonzero(fold == f)[0]
                m = train_svm(Z[tr], _take(y, tr), lam, "crammer_singer", "balanced",
                              classes=classes, seed=seed)
                for i, p in zip(te, m.predict(Z[te])):
                    preds[i] = p
        except ConvergenceError:
            continue
        s = direction * score(measure, y, preds, classes)
        if best is None or s > best[0]:
            best = (s, lam)
    if best is None:
        raise ConvergenceError("no meta-learner lambda converged", float("nan"))
    return train_svm(Z, y, best[1], "crammer_singer", "balanced", classes=classes, seed=seed)


@dataclass(frozen=True, eq=False)
class StackedModel:
    specs: tuple
    bases: tuple               # CalibratedModel per spec, refit on all training data
    meta: LinearModel
    k: int = 5
    seed: int = 0
    oof: np.ndarray = field(default=None, repr=False)

    @property
    def classes(self):
        return self.meta.classes

    @property
    def n_features(self):
        return self.bases[0].n_features

    def meta_inputs(self, X):
        return np.hstack([b.predict_proba(X) for b in self.bases])

    def predict_index(self, X):
        return self.meta.predict_index(self.meta_inputs(X))

    def predict(self, X):
        return [self.classes[i] for i in self.predict_index(X)]


def train_stack(X, y, specs=DEFAULT_BASES, *, k=5, seed=0, measure="accuracy",
                meta_lams=META_LAMBDAS, classes=None) -> StackedModel:
    """Fit the stack: out-of-fold base probabilities, meta model, base refits."""
    y = list(y)
    classes = tuple(classes or ordered_classes(y))
    if any(s.calibration == "none" for s in specs):
        raise ValueError("stacked bases must produce probabilities")
    blocks = []
    for spec in specs:
        res = oof_probabilities(X, y, spec, k, seed, classes)
        audit_no_leakage(res)
        blocks.append(res.proba)
    Z = np.hstack(blocks)
    meta = train_meta(Z, y, classes, lams=meta_lams, k=k, seed=seed, measure=measure)
    bases = tuple(fit_base(s, X, y, classes, k_cal=k, seed=seed) for s in specs)
    return StackedModel(tuple(specs), bases, meta, k, seed, Z)


def stack_predict(model: StackedModel, X):
    if X.shape[1] != model.n_features:
        raise ValueError(f"dimension mismatch: model has {model.n_features} features, "
                         f"input has {X.shape[1]}")
    return model.predict(X)
