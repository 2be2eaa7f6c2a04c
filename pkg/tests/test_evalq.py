import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from metric_cases import CASES, expected_value, scored_value
from tweetsent.corpus import LABEL5, Label2, Label3
from tweetsent.evalq import (
    classify_and_count,
    confusion_matrix,
    f1_pn,
    kld_smoothed,
    macro_recall,
    mae_macro,
    mean_topic_kld,
    prevalence,
    score,
)
from tweetsent.linear import LinearModel

L3 = tuple(Label3)
L2 = (Label2.POSITIVE, Label2.NEGATIVE)


@pytest.mark.parametrize("case", CASES, ids=lambda p: p.name)
def test_metric_case_files(case):
    _, value = scored_value(case)
    assert value == pytest.approx(expected_value(case), abs=1e-9)


def test_case_directions():
    measures = {scored_value(c)[0] for c in CASES}
    assert measures == {"f1_pn", "macro_recall", "mae_macro", "kld"}
    assert len(CASES) == 25


def test_confusion_matrix_bookkeeping():
    cm = confusion_matrix([Label3.POSITIVE, Label3.NEGATIVE, Label3.NEGATIVE],
                          [Label3.NEGATIVE, Label3.NEGATIVE, Label3.NEUTRAL], L3)
    assert cm.total == 3
    rows = cm.counts.sum(axis=1)
    assert [rows[cm.index(c)] for c in (Label3.POSITIVE, Label3.NEGATIVE, Label3.NEUTRAL)] == [1, 2, 0]
    assert cm.counts[cm.index(Label3.NEGATIVE), cm.index(Label3.NEGATIVE)] == 1


def test_mar_empty_class_warns():
    cm = confusion_matrix([Label2.POSITIVE], [Label2.POSITIVE], L2)
    with pytest.warns(UserWarning, match="no gold"):
        assert macro_recall(cm) == 0.5


def test_mae_length_mismatch():
    with pytest.raises(ValueError):
        mae_macro([0, 1], [0])


def test_mae_ordinal_penalty():
    assert mae_macro([2], [-2]) == 4 and mae_macro([2], [1]) == 1


def test_kld_examples():
    p = {"+": 0.5, "-": 0.5}
    q = {"+": 0.25, "-": 0.75}
    raw = 0.5 * math.log(2) + 0.5 * math.log(2 / 3)
    assert raw == pytest.approx(0.1438, abs=1e-4)
    values = [kld_smoothed(p, q, n) for n in (10, 100, 10_000, 10 ** 7)]
    assert all(abs(a - raw) >= abs(b - raw) for a, b in zip(values, values[1:]))
    assert values[-1] == pytest.approx(raw, abs=1e-6)
    assert kld_smoothed(p, p, 3) == 0.0
    assert math.isfinite(kld_smoothed({"+": 1.0, "-": 0.0}, {"+": 0.0, "-": 1.0}, 5))
    # asymmetry, using the same pair reversed
    assert kld_smoothed(p, q, 10 ** 7) != pytest.approx(kld_smoothed(q, p, 10 ** 7), abs=1e-4)


def test_prevalence_and_classify_and_count():
    pv = prevalence([Label2.POSITIVE, Label2.POSITIVE, Label2.NEGATIVE], L2)
    assert list(pv.values()) == pytest.approx([2 / 3, 1 / 3])
    assert list(prevalence([Label2.NEGATIVE] * 3, L2).values()) == [0.0, 1.0]
    with pytest.raises(ValueError):
        prevalence([], L2)
    model = LinearModel(L2, np.array([[-1.0]]), np.zeros(1), "hinge", 1.0)
    X = np.array([[1.0], [2.0], [-1.0]])
    assert list(classify_and_count(model, X).values()) == pytest.approx([2 / 3, 1 / 3])
    with pytest.raises(ValueError):
        classify_and_count(model, np.zeros((0, 1)))


labels3 = st.lists(st.tuples(st.sampled_from(L3), st.sampled_from(L3)), min_size=1, max_size=30)
labels2 = st.lists(st.tuples(st.sampled_from(L2), st.sampled_from(L2), st.sampled_from("ab")),
                   min_size=1, max_size=30)
labels5 = st.lists(st.tuples(st.sampled_from(LABEL5), st.sampled_from(LABEL5)), min_size=1, max_size=30)


@given(labels3, st.randoms(use_true_random=False))
def test_f1_range_and_permutation(pairs, rnd):
    gold, pred = zip(*pairs)
    v = f1_pn(confusion_matrix(gold, pred, L3))
    shuffled = list(pairs)
    rnd.shuffle(shuffled)
    g2, p2 = zip(*shuffled)
    assert 0 <= v <= 1
    assert v == f1_pn(confusion_matrix(g2, p2, L3))


@given(labels2, st.randoms(use_true_random=False))
def test_mar_and_kld_range_and_permutation(triples, rnd):
    gold, pred, topics = zip(*triples)
    shuffled = list(triples)
    rnd.shuffle(shuffled)
    g2, p2, t2 = zip(*shuffled)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        mar = macro_recall(confusion_matrix(gold, pred, L2))
        assert mar == macro_recall(confusion_matrix(g2, p2, L2))
    assert 0 <= mar <= 1
    k = mean_topic_kld(gold, pred, topics, L2)
    assert k >= 0
    assert k == pytest.approx(mean_topic_kld(g2, p2, t2, L2), abs=1e-12)


@given(labels5)
def test_mae_non_negative_and_zero_iff_perfect(pairs):
    gold, pred = zip(*pairs)
    v = mae_macro(gold, pred)
    assert v >= 0
    assert (v == 0) == (list(gold) == list(pred))


@given(st.lists(st.sampled_from(L2), min_size=1, max_size=40))
def test_perfect_classifier_counts_exact(labels):
    X = np.array([[1.0] if lab is Label2.NEGATIVE else [-1.0] for lab in labels])
    model = LinearModel(L2, np.array([[1.0]]), np.zeros(1), "hinge", 1.0)
    assert classify_and_count(model, X) == prevalence(labels, L2)
    assert sum(classify_and_count(model, X).values()) == pytest.approx(1.0, abs=1e-12)


def test_score_unknown_measure():
    with pytest.raises(ValueError):
        score("auc", [1], [1], (1,))
