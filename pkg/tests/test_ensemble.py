import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tweetsent.calibrate import CalibratedModel
from tweetsent.ensemble import (
    DEFAULT_BASES,
    BaseSpec,
    FoldError,
    StackedModel,
    audit_no_leakage,
    oof_probabilities,
    stack_predict,
    stratified_folds,
    train_meta,
    train_stack,
)
from tweetsent.linear import LinearModel

LOGREG = BaseSpec("logreg", "multinomial", "native", lam=1e-2)


def blobs(n, k, seed, spread=1.0):
    rng = np.random.default_rng(seed)
    angles = 2 * np.pi * np.arange(k) / k
    centers = 3 * np.column_stack([np.cos(angles), np.sin(angles)])
    y = np.arange(n) % k
    return centers[y] + spread * rng.normal(size=(n, 2)), list(y)


@given(st.lists(st.sampled_from("abc"), min_size=12, max_size=60), st.integers(2, 5), st.integers(0, 99))
def test_fold_partition_is_stratified(labels, k, seed):
    counts = {c: labels.count(c) for c in set(labels)}
    if min(counts.values()) < 2:
        with pytest.raises(FoldError):
            stratified_folds(labels, k, seed)
        return
    fold = stratified_folds(labels, k, seed)
    assert set(fold.tolist()) <= set(range(k))
    sizes = np.bincount(fold, minlength=k)
    assert sizes.max() - sizes.min() <= 1
    for c, n_c in counts.items():
        per = np.bincount(fold[np.array(labels) == c], minlength=k)
        assert set(per.tolist()) <= {n_c // k, -(-n_c // k)}


def test_leave_one_out_on_four_samples():
    X, y = blobs(4, 2, 0)
    res = oof_probabilities(X, y, LOGREG, k=4)
    assert audit_no_leakage(res)
    for i in range(4):
        assert i not in res.trained_on[res.fold[i]]
    np.testing.assert_allclose(res.proba.sum(axis=1), 1.0, atol=1e-9)


def test_audit_catches_leak():
    X, y = blobs(20, 2, 1)
    res = oof_probabilities(X, y, LOGREG, k=5)
    leaky = type(res)(res.proba, res.fold, tuple(np.arange(20) for _ in res.trained_on), res.filled)
    with pytest.raises(AssertionError, match="training split"):
        audit_no_leakage(leaky)


def test_permuting_samples_permutes_rows():
    X, y = blobs(30, 3, 2)
    fold = stratified_folds(y, 3, 0)
    perm = np.random.default_rng(0).permutation(30)
    a = oof_probabilities(X, y, LOGREG, classes=(0, 1, 2), fold=fold)
    b = oof_probabilities(X[perm], [y[i] for i in perm], LOGREG, classes=(0, 1, 2), fold=fold[perm])
    np.testing.assert_allclose(b.proba, a.proba[perm], atol=1e-6)


@pytest.mark.parametrize("spec", DEFAULT_BASES, ids=lambda s: s.name)
def test_oof_rows_on_simplex(spec):
    X, y = blobs(60, 3, 3, spread=2.0)
    res = oof_probabilities(X, y, spec.with_lam(1e-2), k=5, seed=1)
    audit_no_leakage(res)
    assert np.isfinite(res.proba).all()
    np.testing.assert_allclose(res.proba.sum(axis=1), 1.0, atol=1e-9)
    assert res.proba.min() >= 0


def two_perfect_two_random(n, k, seed):
    rng = np.random.default_rng(seed)
    y = rng.integers(0, k, n)
    onehot = np.eye(k)[y]
    perfect = [0.6 * onehot + 0.4 * rng.dirichlet(np.ones(k), n) for _ in range(2)]
    noise = [rng.dirichlet(np.ones(k), n) for _ in range(2)]
    return np.hstack([noise[0], perfect[0], noise[1], perfect[1]]), list(y)


def test_meta_recovers_perfect_bases():
    Z, y = two_perfect_two_random(300, 3, 0)
    Zt, yt = two_perfect_two_random(300, 3, 1)
    meta = train_meta(Z, y)
    acc = np.mean(np.array(meta.predict(Zt)) == np.array(yt))
    assert acc >= 0.99
    assert Z.shape[1] == 4 * 3


def test_identical_bases_give_no_gain():
    rng = np.random.default_rng(4)
    y = list(rng.integers(0, 3, 200))
    P = rng.dirichlet(np.ones(3), 200)
    P[np.arange(200), y] += 0.3
    P /= P.sum(axis=1, keepdims=True)
    single = np.mean(P.argmax(axis=1) == np.array(y))
    meta = train_meta(np.hstack([P] * 4), y)
    assert np.mean(np.array(meta.predict(np.hstack([P] * 4))) == np.array(y)) <= single + 0.05


def test_single_base_identity_meta_reduces_to_base():
    X, y = blobs(30, 3, 5)
    base = CalibratedModel(LinearModel((0, 1, 2), np.array([[1.0, 0], [0, 1.0], [-1.0, -1.0]]),
                                       np.zeros(3), "multinomial", 1.0), "native")
    meta = LinearModel((0, 1, 2), np.eye(3), np.zeros(3), "crammer_singer", 1.0)
    stack = StackedModel((LOGREG,), (base,), meta)
    assert stack_predict(stack, X) == base.predict(X)
    with pytest.raises(ValueError, match="dimension"):
        stack_predict(stack, np.zeros((2, 3)))


@pytest.mark.slow
@pytest.mark.parametrize("k", [2, 3, 5])
def test_stack_runs_for_class_counts(k):
    X, y = blobs(20 * k, k, 6, spread=0.7)
    specs = tuple(s.with_lam(1e-2) for s in DEFAULT_BASES)
    model = train_stack(X, y, specs, k=5, seed=0)
    assert model.meta.W.shape[1] == 4 * k
    pred = stack_predict(model, X)
    assert set(pred) <= set(model.classes)
    assert pred == stack_predict(model, X)
    assert np.mean(np.array(pred) == np.array(y)) > 0.8


def test_stack_rejects_uncalibrated_base():
    X, y = blobs(20, 2, 0)
    with pytest.raises(ValueError, match="probabilities"):
        train_stack(X, y, (BaseSpec("svm", "ovr", "none"),))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_no_leakage_random_seeds(seed):
    X, y = blobs(24, 3, seed)
    res = oof_probabilities(X, y, LOGREG, k=4, seed=seed)
    assert audit_no_leakage(res)
