import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regfair.audit import AuditConfig, audit_probabilities
from regfair.classifier import ProbabilityMatrix
from regfair.core import validate_dataset
from regfair.crossval import balanced_accuracy, held_out_probs, stratified_folds


def test_two_fold_split_is_forced():
    fa = stratified_folds([0, 0, 1, 1], 2, seed=3)
    for f in range(2):
        assert sorted(np.array([0, 0, 1, 1])[fa.fold_of == f].tolist()) == [0, 1]


def test_fold_counts_for_imbalanced_classes():
    rng = np.random.default_rng(0)
    labels = np.r_[np.ones(700, int), np.zeros(300, int)]
    rng.shuffle(labels)
    fa = stratified_folds(labels, 10, seed=1)
    ones = [int(np.sum(labels[fa.fold_of == f])) for f in range(10)]
    assert ones == [70] * 10


def test_folds_deterministic():
    labels = np.random.default_rng(1).integers(0, 3, 100)
    a, b = stratified_folds(labels, 5, 11), stratified_folds(labels, 5, 11)
    assert np.array_equal(a.fold_of, b.fold_of)


def test_class_smaller_than_folds():
    with pytest.raises(ValueError, match="fewer than"):
        stratified_folds([0, 0, 0, 1], 2)


@settings(max_examples=50)
@given(st.lists(st.integers(0, 3), min_size=8, max_size=120), st.integers(1, 4), st.integers(0, 99))
def test_stratification_property(labels, n_folds, seed):
    labels = np.array(labels)
    if np.bincount(labels)[np.unique(labels)].min() < n_folds:
        return
    fa = stratified_folds(labels, n_folds, seed)
    for c in np.unique(labels):
        per = np.bincount(fa.fold_of[labels == c], minlength=n_folds)
        assert per.max() - per.min() <= 1
    assert np.all(np.bincount(fa.fold_of, minlength=n_folds) > 0)


def _independent_dataset(n=600, k=2, seed=0):
    rng = np.random.default_rng(seed)
    return validate_dataset(rng.normal(size=n), rng.normal(size=n), rng.integers(0, k, n))


@pytest.mark.parametrize("kind", ["S", "Y", "YS"])
def test_independent_labels_recover_base_rates(kind):
    ds = _independent_dataset()
    p = held_out_probs(ds, kind)
    base = np.bincount(ds.sensitive) / ds.n
    assert np.max(np.abs(p.probs.mean(axis=0) - base)) <= 0.03


def test_fair_score_balanced_accuracy(scenario):
    _, res = scenario("fair", 0)
    assert abs(res.report.balanced_accuracy_s - 0.5) <= 0.05


def test_joint_classifier_target_mean(scenario):
    _, res = scenario("target_mean", 0)
    assert res.report.balanced_accuracy_ys >= 0.95


def test_coverage_and_no_leakage(monkeypatch):
    ds = _independent_dataset(n=100)
    from regfair import crossval

    seen = []
    orig = crossval.ClassifierConfig.train

    def spy(self, x, a, k, seed):
        seen.append({tuple(r) for r in np.asarray(x)})
        return orig(self, x, a, k, seed)

    monkeypatch.setattr(crossval.ClassifierConfig, "train", spy)
    folds = stratified_folds(ds.sensitive, 5, 0)
    p = held_out_probs(ds, "S", folds=folds)
    assert not np.isnan(p.probs).any()
    x = ds.inputs("S")
    for f, train_rows in enumerate(seen):
        for i in folds.test_index(f):
            assert tuple(x[i]) not in train_rows


def test_permutation_equivariance():
    ds = _independent_dataset(n=200, seed=4)
    folds = stratified_folds(ds.sensitive, 5, 0)
    perm = np.random.default_rng(9).permutation(ds.n)
    pds = validate_dataset(ds.targets[perm], ds.scores[perm], ds.sensitive[perm])
    from regfair.crossval import FoldAssignment

    pfolds = FoldAssignment(folds.fold_of[perm], 5)
    a = held_out_probs(ds, "YS", folds=folds).probs
    b = held_out_probs(pds, "YS", folds=pfolds).probs
    np.testing.assert_allclose(b, a[perm], atol=1e-9)


def test_shared_folds_across_classifiers(monkeypatch):
    from regfair import audit

    used = []
    orig = audit.held_out_probs

    def spy(ds, kind, n_folds, seed, config, folds=None, held_in=False):
        used.append(folds)
        return orig(ds, kind, n_folds, seed, config, folds=folds, held_in=held_in)

    monkeypatch.setattr(audit, "held_out_probs", spy)
    audit_probabilities(_independent_dataset(n=120), AuditConfig(n_folds=3))
    assert len(used) == 3 and used[0] is used[1] is used[2]


def test_ba_uniform_rows_tie_to_class_zero():
    for k in (2, 3):
        labels = np.arange(30) % k
        assert balanced_accuracy(np.full((30, k), 1.0 / k), labels) == pytest.approx(1.0 / k)


def test_ba_perfect():
    labels = np.array([0, 1, 2, 1, 0])
    assert balanced_accuracy(np.eye(3)[labels], labels) == 1.0


def test_ba_constant_base_rate_classifier():
    labels = np.array([0] * 3 + [1] * 7)
    assert balanced_accuracy(ProbabilityMatrix(np.tile([0.3, 0.7], (10, 1))), labels) == 0.5


@given(st.lists(st.lists(st.floats(0.01, 1), min_size=3, max_size=3), min_size=3, max_size=30),
       st.floats(0.1, 10))
def test_ba_invariant_to_argmax_preserving_rescale(rows, c):
    p = np.array(rows)
    labels = np.arange(len(rows)) % 3
    assert balanced_accuracy(p, labels) == balanced_accuracy(c * p**3, labels)
