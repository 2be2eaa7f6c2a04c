"""Scoring measures and classify-and-count quantification."""
from __future__ import annotations

import math
import warnings
from collections import Counter, OrderedDict
from dataclasses import dataclass

import numpy as np

from .corpus import Label2, Label3

__all__ = [
    "ConfusionMatrix",
    "confusion_matrix",
    "f1_pn",
    "macro_recall",
    "mae_macro",
    "kld_smoothed",
    "prevalence",
    "classify_and_count",
    "accuracy",
    "mean_topic_kld",
    "score",
    "MEASURES",
]


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """``counts[g, p]``: number of items with gold ``classes[g]`` predicted ``classes[p]``."""

    counts: np.ndarray
    classes: tuple

    def __post_init__(self):
        k = len(self.classes)
        if self.counts.shape != (k, k) or np.any(self.counts < 0):
            raise ValueError("counts must be a non-negative C x C matrix")

    @property
    def total(self):
        return int(self.counts.sum())

    def index(self, c):
        return self.classes.index(c)

    def f1(self, c):
        k = self.index(c)
        tp = self.counts[k, k]
        n_pred = self.counts[:, k].sum()
        n_gold = self.counts[k, :].sum()
        prec = tp / n_pred if n_pred else 0.0
        rec = tp / n_gold if n_gold else 0.0
        return 2.0 * prec * rec / (prec + rec) if prec + rec > 0 else 0.0

    def recall(self, c):
        k = self.index(c)
        n_gold = self.counts[k, :].sum()
        if n_gold == 0:
            warnings.warn(f"class {c!s} has no gold items; its recall counts as 0", stacklevel=3)
            return 0.0
        return self.counts[k, k] / n_gold


def confusion_matrix(gold, pred, classes=None) -> ConfusionMatrix:
    gold, pred = list(gold), list(pred)
    if len(gold) != len(pred):
        raise ValueError(f"{len(gold)} gold labels but {len(pred)} predictions")
    if classes is None:
        classes = sorted(set(gold) | set(pred), key=lambda c: (str(type(c)), c))
    classes = tuple(classes)
    index = {c: i for i, c in enumerate(classes)}
    counts = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for g, p in zip(gold, pred):
        counts[index[g], index[p]] += 1
    return ConfusionMatrix(counts, classes)


def f1_pn(cm: ConfusionMatrix) -> float:
    """Mean F1 of the positive and negative classes (neutral F1 is ignored)."""
    pos, neg = _pn(cm.classes)
    return (cm.f1(pos) + cm.f1(neg)) / 2.0


def macro_recall(cm: ConfusionMatrix) -> float:
    pos, neg = _pn(cm.classes)
    return (cm.recall(pos) + cm.recall(neg)) / 2.0


def _pn(classes):
    for pos, neg in ((Label3.POSITIVE, Label3.NEGATIVE), (Label2.POSITIVE, Label2.NEGATIVE)):
        if pos in classes and neg in classes:
            return classes[classes.index(pos)], classes[classes.index(neg)]
    raise ValueError("confusion matrix lacks the positive and negative classes")


def mae_macro(gold, pred) -> float:
    """Mean absolute error averaged over the classes present in ``gold``."""
    gold, pred = list(gold), list(pred)
    if len(gold) != len(pred):
        raise ValueError(f"{len(gold)} gold labels but {len(pred)} predictions")
    if not gold:
        raise ValueError("mae_macro of an empty list")
    err = {}
    for g, p in zip(gold, pred):
        err.setdefault(g, []).append(abs(int(p) - int(g)))
    return sum(sum(v) / len(v) for v in err.values()) / len(err)


def accuracy(gold, pred) -> float:
    gold, pred = list(gold), list(pred)
    if len(gold) != len(pred) or not gold:
        raise ValueError("accuracy needs two non-empty aligned lists")
    return sum(g == p for g, p in zip(gold, pred)) / len(gold)


def kld_smoothed(true_prev, est_prev, test_size) -> float:
    """KL(p || q) in nats after additive smoothing with ``eps = 1 / (2 * test_size)``.

    Both arguments map class -> prevalence over the same classes.
    """
    if test_size < 1:
        raise ValueError("test_size must be at least 1")
    if set(true_prev) != set(est_prev):
        raise ValueError("prevalences are over different class sets")
    eps = 1.0 / (2.0 * test_size)
    k = len(true_prev)
    total = 0.0
    for c, p in true_prev.items():
        ps = (p + eps) / (1.0 + k * eps)
        qs = (est_prev[c] + eps) / (1.0 + k * eps)
        total += ps * math.log(ps / qs)
    return total


def prevalence(labels, classes) -> OrderedDict:
    """Fraction of ``labels`` in each class, in ``classes`` order."""
    labels = list(labels)
    if not labels:
        raise ValueError("prevalence of an empty group")
    counts = Counter(labels)
    unknown = set(counts) - set(classes)
    if unknown:
        raise ValueError(f"labels {sorted(map(str, unknown))} not among classes")
    n = len(labels)
    return OrderedDict((c, counts.get(c, 0) / n) for c in classes)


def classify_and_count(model, X, classes=None) -> OrderedDict:
    """Prevalence of each class among the model's predictions on ``X``."""
    if X.shape[0] == 0:
        raise ValueError("classify_and_count needs a non-empty group")
    return prevalence(model.predict(X), classes or model.classes)


def mean_topic_kld(gold, pred, topics, classes) -> float:
    """Smoothed KLD per topic, averaged with equal topic weight."""
    groups = OrderedDict()
    for g, p, t in zip(gold, pred, topics):
        groups.setdefault(t, ([], []))
        groups[t][0].append(g)
        groups[t][1].append(p)
    if not groups:
        raise ValueError("no topics to score")
    return sum(kld_smoothed(prevalence(g, classes), prevalence(p, classes), len(g))
               for g, p in groups.values()) / len(groups)


# +1: higher is better, -1: lower is better
MEASURES = {
    "f1_pn": +1,
    "macro_recall": +1,
    "mae_macro": -1,
    "kld": -1,
    "accuracy": +1,
}


def score(measure, gold, pred, classes, topics=None) -> float:
    """Evaluate ``measure`` by name on aligned label lists."""
    if measure == "f1_pn":
        return f1_pn(confusion_matrix(gold, pred, classes))
    if measure == "macro_recall":
        return macro_recall(confusion_matrix(gold, pred, classes))
    if measure == "mae_macro":
        return mae_macro(gold, pred)
    if measure == "accuracy":
        return accuracy(gold, pred)
    if measure == "kld":
        if topics is None:
            topics = [None] * len(gold)
        return mean_topic_kld(gold, pred, topics, classes)
    raise ValueError(f"unknown measure {measure!r}")
