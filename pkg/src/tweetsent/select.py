"""Hyperparameter grids, cross-validated grid search and three-step validation."""
from __future__ import annotations

import csv
import io
import itertools
import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .ensemble import BaseSpec, stratified_folds
from .evalq import MEASURES, score
from .linear import ConvergenceError, ordered_classes, train_logreg, train_svm
from .vectorize import HashSpec, Vectorizer

__all__ = [
    "Grid",
    "Config",
    "ValidationReport",
    "grid_search",
    "three_step_validate",
    "select_across_steps",
]

log = logging.getLogger(__name__)

DEFAULT_ALPHAS = (0.2, 0.4, 0.6, 0.8, 1.0)
DEFAULT_LAMBDAS = tuple(10.0 ** k for k in range(-7, 7))


@dataclass(frozen=True)
class Config:
    hash_dim: int
    alpha: float
    lam: float

    def as_dict(self):
        return {"hash_dim": self.hash_dim, "alpha": self.alpha, "lam": self.lam}


@dataclass(frozen=True)
class Grid:
    """Axes of the search.  Enumeration is over sorted axes, so the order in
    which values are given never changes the result."""

    alpha: tuple = DEFAULT_ALPHAS
    lam: tuple = DEFAULT_LAMBDAS
    hash_dim: tuple = (2 ** 18,)

    def __post_init__(self):
        for name in ("alpha", "lam", "hash_dim"):
            values = tuple(sorted(set(getattr(self, name))))
            if not values:
                raise ValueError(f"grid axis {name} is empty")
            object.__setattr__(self, name, values)

    def configs(self):
        return [Config(d, a, l) for d, a, l in itertools.product(self.hash_dim, self.alpha, self.lam)]

    def __len__(self):
        return len(self.hash_dim) * len(self.alpha) * len(self.lam)


@dataclass
class ValidationReport:
    measure: str
    rows: list = field(default_factory=list)   # dicts: config, cv_mean, folds, dev, devtest, status
    chosen: object = None
    notes: list = field(default_factory=list)

    @property
    def direction(self):
        return MEASURES[self.measure]

    def best(self, key="cv_mean"):
        """First row with the best finite ``key`` value in enumeration order."""
        best = None
        for row in self.rows:
            v = row.get(key)
            if v is None or not math.isfinite(v):
                continue
            if best is None or self.direction * v > self.direction * best[key]:
                best = row
        return best

    def to_tsv(self):
        keys = sorted({k for r in self.rows for k in _config_dict(r["config"])})
        buf = io.StringIO()
        w = csv.writer(buf, delimiter="\t", lineterminator="\n")
        w.writerow(keys + ["cv_mean", "dev", "devtest", "status"])
        for r in self.rows:
            cfg = _config_dict(r["config"])
            w.writerow([_fmt(cfg.get(k)) for k in keys]
                       + [_fmt(r.get("cv_mean")), _fmt(r.get("dev")), _fmt(r.get("devtest")),
                          r.get("status", "ok")])
        return buf.getvalue()

    def to_json(self):
        def clean(v):
            if isinstance(v, float) and not math.isfinite(v):
                return None
            return v
        rows = [{"config": _config_dict(r["config"]),
                 **{k: clean(r.get(k)) for k in ("cv_mean", "dev", "devtest")},
                 "folds": [clean(x) for x in r.get("folds", [])],
                 "status": r.get("status", "ok")} for r in self.rows]
        return json.dumps({"measure": self.measure, "direction": self.direction,
                           "chosen": None if self.chosen is None else _config_dict(self.chosen),
                           "rows": rows, "notes": self.notes}, indent=2, sort_keys=True)


def _config_dict(c):
    return c.as_dict() if hasattr(c, "as_dict") else dict(c)


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    return str(v)


def _fit_predict(spec, Xtr, ytr, Xte, classes, seed):
    if spec.learner == "svm":
        m = train_svm(Xtr, ytr, spec.lam, spec.mode, spec.class_weight, classes=classes, seed=seed)
    else:
        m = train_logreg(Xtr, ytr, spec.lam, spec.mode, spec.class_weight, classes=classes)
    return m.predict(Xte)


def grid_search(bundles, labels, grid: Grid, spec: BaseSpec, measure, *, k=5, seed=0,
                topics=None, vectorizer: Vectorizer | None = None, classes=None) -> ValidationReport:
    """Stratified ``k``-fold CV of ``spec`` over every grid configuration.

    Features are hashed per ``(hash_dim, alpha)`` and dense scales are fit
    on each training split only.  Calibration is not part of the search:
    folds are scored on the argmax of the raw linear scores.  A
    configuration whose solver does not converge is marked ``failed`` and
    can never be chosen.
    """
    bundles, labels = list(bundles), list(labels)
    classes = tuple(classes or ordered_classes(labels))
    vectorizer = vectorizer or Vectorizer()
    if measure not in MEASURES:
        raise ValueError(f"unknown measure {measure!r}")
    fold = stratified_folds(labels, k, seed)
    splits = [(np.nonzero(fold != f)[0], np.nonzero(fold == f)[0]) for f in range(k)]
    results = {}
    for dim in grid.hash_dim:
        base = Vectorizer(HashSpec(dim, vectorizer.spec.seed, vectorizer.spec.signed),
                          1.0, vectorizer.weighting, vectorizer.normalize)
        fitted = [base.fit([bundles[i] for i in tr]) for tr, _ in splits]
        for alpha in grid.alpha:
            mats = []
            for (tr, te), vec in zip(splits, fitted):
                vec = vec.with_alpha(alpha)
                mats.append((vec.transform([bundles[i] for i in tr]),
                             vec.transform([bundles[i] for i in te])))
            for lam in grid.lam:
                cfg = Config(dim, alpha, lam)
                fold_scores, status = [], "ok"
                for (tr, te), (Xtr, Xte) in zip(splits, mats):
                    try:
                        pred = _fit_predict(spec.with_lam(lam), Xtr, [labels[i] for i in tr],
                                            Xte, classes, seed)
                    except ConvergenceError as exc:
                        status = f"failed: {exc}"
                        break
                    gold = [labels[i] for i in te]
                    fold_topics = None if topics is None else [topics[i] for i in te]
                    fold_scores.append(score(measure, gold, pred, classes, fold_topics))
                mean = float(np.mean(fold_scores)) if status == "ok" else float("nan")
                results[cfg] = {"config": cfg, "cv_mean": mean,
                                "folds": fold_scores if status == "ok" else [], "status": status}
                log.info("%s %s=%s", cfg, measure, mean)
    report = ValidationReport(measure, [results[c] for c in grid.configs()])
    best = report.best("cv_mean")
    if best is None:
        raise ConvergenceError("no grid configuration converged", float("nan"))
    report.chosen = best["config"]
    return report


def three_step_validate(train, dev, devtest, fit, predict, measure, classes, *, config=None):
    """Train / validate / retrain-and-validate.

    ``fit(records)`` returns a model and ``predict(model, records)`` its
    labels.  Step one fits on ``train`` and scores ``dev``; step three
    refits on ``train + dev`` and scores ``devtest`` (skipped when
    ``devtest`` is empty).  Every fit call is audited against the ids it
    is later scored on.
    """
    splits = {"train": train, "dev": dev, "devtest": devtest}
    ids = {name: {r.id for r in ds} for name, ds in splits.items()}
    for a, b in itertools.combinations(splits, 2):
        shared = ids[a] & ids[b]
        if shared:
            raise ValueError(f"{a} and {b} share {len(shared)} ids, e.g. {sorted(shared)[0]!r}")
    fit_log = []

    def audited_fit(records, scored_ids):
        seen = {r.id for r in records}
        if seen & scored_ids:
            raise AssertionError("an evaluation record entered a fit call")
        fit_log.append(len(records))
        return fit(records)

    def measure_on(model, ds):
        pred = predict(model, list(ds))
        return score(measure, [r.label for r in ds], pred, classes, [r.topic for r in ds])

    row = {"config": config or {}, "cv_mean": None, "status": "ok"}
    model = audited_fit(list(train), ids["dev"] | ids["devtest"])
    row["dev"] = measure_on(model, dev)
    report = ValidationReport(measure, [row], chosen=config)
    if len(devtest) == 0:
        row["devtest"] = None
        report.notes.append("devtest empty: step three skipped")
        log.warning("devtest split is empty; step three skipped")
    else:
        model = audited_fit(list(train) + list(dev), ids["devtest"])
        row["devtest"] = measure_on(model, devtest)
    row["fit_sizes"] = fit_log
    return report


def select_across_steps(reports):
    """Pick the configuration with the best mean of its dev and devtest scores.

    ``reports`` are single-row reports from :func:`three_step_validate`;
    a missing devtest score leaves the dev score alone.  Ties keep the
    earlier report.
    """
    best, best_val = None, None
    for rep in reports:
        row = rep.rows[0]
        vals = [v for v in (row.get("dev"), row.get("devtest")) if v is not None]
        v = rep.direction * float(np.mean(vals))
        if best is None or v > best_val:
            best, best_val = rep, v
    return best.chosen
