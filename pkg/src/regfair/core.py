"""Audit data model: validated datasets, group counts and the report record."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np


class DataError(ValueError):
    """Raised when audit inputs violate the dataset invariants."""


@dataclass(frozen=True)
class AuditDataset:
    """Aligned targets, scores and dense sensitive labels.

    ``targets`` and ``scores`` are float64 matrices of shape (N, d).
    ``sensitive`` holds labels in ``{0, ..., K-1}``; ``classes`` maps each
    dense label back to the original token.
    """

    targets: np.ndarray
    scores: np.ndarray
    sensitive: np.ndarray
    classes: tuple = field(default=())

    @property
    def n(self) -> int:
        return int(self.sensitive.shape[0])

    @property
    def k_classes(self) -> int:
        return len(self.classes)

    def inputs(self, kind: str) -> np.ndarray:
        """Classifier input matrix for ``kind`` in {"S", "Y", "YS"}."""
        if kind == "S":
            return self.scores
        if kind == "Y":
            return self.targets
        if kind == "YS":
            return np.hstack([self.targets, self.scores])
        raise ValueError(f"unknown input kind {kind!r}")

    def decode(self, labels: np.ndarray | None = None) -> list:
        labels = self.sensitive if labels is None else labels
        return [self.classes[i] for i in labels]


@dataclass(frozen=True)
class GroupCounts:
    counts: np.ndarray
    total: int

    @property
    def proportions(self) -> np.ndarray:
        return self.counts / self.total


@dataclass(frozen=True)
class FairnessReport:
    """The six fairness measures plus classifier diagnostics.

    Ratio fields are ``None`` when the sensitive attribute is not binary.
    NMI fields are ``None`` when their normaliser is numerically zero.
    """

    ratio_ind: float | None
    ratio_sep: float | None
    ratio_suf: float | None
    nmi_ind: float | None
    nmi_sep: float | None
    nmi_suf: float | None
    balanced_accuracy_s: float
    balanced_accuracy_y: float
    balanced_accuracy_ys: float
    n: int
    k_classes: int
    diagnostics: tuple = ()

    RATIO_FIELDS = ("ratio_ind", "ratio_sep", "ratio_suf")
    NMI_FIELDS = ("nmi_ind", "nmi_sep", "nmi_suf")

    def __post_init__(self):
        for name in self.NMI_FIELDS:
            v = getattr(self, name)
            if v is not None and v > 1 + 1e-9:
                raise ValueError(f"{name}={v} exceeds 1")
        for name in self.RATIO_FIELDS:
            v = getattr(self, name)
            if v is not None and not (np.isfinite(v) and v > 0):
                raise ValueError(f"{name}={v} must be finite and positive")

    def measures(self) -> dict[str, Any]:
        out = {name: getattr(self, name) for name in self.RATIO_FIELDS if self.k_classes == 2}
        out.update({name: getattr(self, name) for name in self.NMI_FIELDS})
        out["n"] = self.n
        out["k_classes"] = self.k_classes
        return out

    def balanced_accuracy(self) -> dict[str, float]:
        return {
            "s": self.balanced_accuracy_s,
            "y": self.balanced_accuracy_y,
            "ys": self.balanced_accuracy_ys,
        }


def _as_matrix(x, name: str) -> np.ndarray:
    try:
        arr = np.asarray(x, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise DataError(f"{name} must be numeric: {exc}") from None
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise DataError(f"{name} must be 1-D or 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{name} contains non-finite values")
    return arr


def encode_labels(raw: Sequence) -> tuple[np.ndarray, tuple]:
    """Densify arbitrary label tokens to ``0..K-1``.

    Integer-valued tokens are ordered numerically so that e.g. ``1`` keeps
    meaning "the second class" across file round trips; any other tokens are
    ordered by first appearance.
    """
    tokens = list(np.asarray(raw, dtype=object).ravel())
    ints = []
    for t in tokens:
        try:
            f = float(t)
        except (TypeError, ValueError):
            ints = None
            break
        if not f.is_integer():
            ints = None
            break
        ints.append(int(f))
    if ints is not None:
        classes = tuple(sorted(set(ints)))
        lookup = {c: i for i, c in enumerate(classes)}
        return np.array([lookup[v] for v in ints], dtype=np.int64), classes

    lookup: dict = {}
    for t in tokens:
        lookup.setdefault(t, len(lookup))
    return np.array([lookup[t] for t in tokens], dtype=np.int64), tuple(lookup)


def validate_dataset(targets, scores, sensitive, n_folds: int = 1) -> AuditDataset:
    """Check and package raw audit arrays.

    Raises ``DataError`` on length mismatch, non-finite values, fewer than
    two sensitive classes, or any class smaller than ``n_folds``.
    """
    y = _as_matrix(targets, "targets")
    s = _as_matrix(scores, "scores")
    labels, classes = encode_labels(sensitive)
    n = labels.shape[0]
    if y.shape[0] != n or s.shape[0] != n:
        raise DataError(
            f"length mismatch: targets={y.shape[0]}, scores={s.shape[0]}, sensitive={n}"
        )
    if len(classes) < 2:
        raise DataError("need at least 2 distinct sensitive values")
    counts = np.bincount(labels, minlength=len(classes))
    if counts.min() < max(n_folds, 1):
        small = classes[int(np.argmin(counts))]
        raise DataError(
            f"sensitive class {small!r} has {counts.min()} instances, fewer than folds={n_folds}"
        )
    for arr in (y, s, labels):
        arr.setflags(write=False)
    return AuditDataset(targets=y, scores=s, sensitive=labels, classes=classes)


def group_counts(dataset: AuditDataset) -> GroupCounts:
    counts = np.bincount(dataset.sensitive, minlength=dataset.k_classes)
    return GroupCounts(counts=counts, total=dataset.n)


def counts_from_labels(labels, k: int | None = None) -> GroupCounts:
    labels = np.asarray(labels)
    counts = np.bincount(labels, minlength=k or 0)
    return GroupCounts(counts=counts, total=int(labels.shape[0]))
