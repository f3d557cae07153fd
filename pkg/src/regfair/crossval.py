"""Stratified folds, held-out class probabilities and balanced accuracy."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classifier import (
    DEFAULT_BANDWIDTH_FACTOR,
    DEFAULT_EPSILON,
    DEFAULT_L2,
    DEFAULT_N_BASIS,
    ProbabilityMatrix,
    predict_proba,
    train_classifier,
)
from .core import AuditDataset


@dataclass(frozen=True)
class FoldAssignment:
    fold_of: np.ndarray
    n_folds: int

    def test_index(self, f: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of == f)

    def train_index(self, f: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of != f)


@dataclass(frozen=True)
class ClassifierConfig:
    n_basis: int = DEFAULT_N_BASIS
    l2_strength: float = DEFAULT_L2
    clamp_epsilon: float = DEFAULT_EPSILON
    bandwidth_factor: float = DEFAULT_BANDWIDTH_FACTOR

    def train(self, inputs, labels, n_classes: int, seed: int):
        return train_classifier(
            inputs, labels, n_classes, self.n_basis, self.l2_strength, seed, self.bandwidth_factor
        )


def stratified_folds(labels, n_folds: int, seed: int = 0) -> FoldAssignment:
    """Shuffle each class by ``seed`` and deal its members round-robin.

    The dealing offset carries over between classes so fold sizes stay
    balanced overall, not only within each class.
    """
    labels = np.asarray(labels)
    if n_folds < 1:
        raise ValueError("n_folds must be >= 1")
    rng = np.random.default_rng(seed)
    fold_of = np.empty(labels.shape[0], dtype=np.int64)
    offset = 0
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        if idx.size < n_folds:
            raise ValueError(f"class {c!r} has {idx.size} members, fewer than {n_folds} folds")
        idx = rng.permutation(idx)
        fold_of[idx] = (np.arange(idx.size) + offset) % n_folds
        offset = (offset + idx.size) % n_folds
    return FoldAssignment(fold_of=fold_of, n_folds=n_folds)


def held_out_probs(
    dataset: AuditDataset,
    input_kind: str,
    n_folds: int = 10,
    seed: int = 0,
    config: ClassifierConfig = ClassifierConfig(),
    folds: FoldAssignment | None = None,
    held_in: bool = False,
) -> ProbabilityMatrix:
    """Cross-validated p(a | input) for every instance.

    With ``held_in=True`` a single classifier is trained and evaluated on all
    instances instead.  Pass ``folds`` to share one assignment across the
    three input kinds of an audit.
    """
    x = dataset.inputs(input_kind)
    a = dataset.sensitive
    k = dataset.k_classes
    if held_in:
        model = config.train(x, a, k, seed)
        return predict_proba(model, x, config.clamp_epsilon)
    if folds is None:
        folds = stratified_folds(a, n_folds, seed)
    out = np.full((dataset.n, k), np.nan)
    for f in range(folds.n_folds):
        tr, te = folds.train_index(f), folds.test_index(f)
        model = config.train(x[tr], a[tr], k, seed + f)
        out[te] = predict_proba(model, x[te], config.clamp_epsilon).probs
    assert not np.isnan(out).any()
    return ProbabilityMatrix(out, config.clamp_epsilon)


def balanced_accuracy(probs, labels) -> float:
    """Mean per-class recall of the argmax decision (ties go to the lower class)."""
    p = probs.probs if isinstance(probs, ProbabilityMatrix) else np.asarray(probs)
    labels = np.asarray(labels)
    pred = np.argmax(p, axis=1)
    recalls = [np.mean(pred[labels == c] == c) for c in range(p.shape[1]) if np.any(labels == c)]
    return float(np.mean(recalls))
