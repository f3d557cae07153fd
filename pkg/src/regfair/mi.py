"""Normalised (conditional) mutual information fairness measures.

All quantities are in nats.  Each estimator averages a log-probability of
the instance's *actual* class, using classifier probabilities in place of
the unknown conditionals.  Held-out probabilities can make the estimates
slightly negative; they are returned raw.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classifier import ProbabilityMatrix
from .core import GroupCounts

NORMALIZER_FLOOR = 1e-9


def _p(probs) -> np.ndarray:
    return probs.probs if isinstance(probs, ProbabilityMatrix) else np.asarray(probs, dtype=np.float64)


def _own_class(probs, labels) -> np.ndarray:
    p = _p(probs)
    labels = np.asarray(labels)
    if p.shape[0] != labels.shape[0]:
        raise ValueError(f"probability rows ({p.shape[0]}) do not match labels ({labels.shape[0]})")
    return p[np.arange(p.shape[0]), labels]


@dataclass(frozen=True)
class MiMeasures:
    entropy_a: float
    cond_entropy_a_given_y: float
    cond_entropy_a_given_s: float
    mi_ind: float
    cmi_sep: float
    cmi_suf: float
    nmi_ind: float | None
    nmi_sep: float | None
    nmi_suf: float | None


def entropy_a(counts: GroupCounts) -> float:
    p = counts.counts[counts.counts > 0] / counts.total
    return float(-np.sum(p * np.log(p)))


def mi_ind(probs_s, labels, counts: GroupCounts) -> float:
    base = counts.counts / counts.total
    labels = np.asarray(labels)
    return float(np.mean(np.log(_own_class(probs_s, labels) / base[labels])))


def cond_entropy(probs, labels) -> float:
    return float(-np.mean(np.log(_own_class(probs, labels))))


def _cmi(probs_joint, probs_marg, labels) -> float:
    pj = _own_class(probs_joint, labels)
    pm = _own_class(probs_marg, labels)
    return float(np.mean(np.log(pj / pm)))


def cmi_sep(probs_ys, probs_y, labels) -> float:
    if _p(probs_ys).shape != _p(probs_y).shape:
        raise ValueError("probability matrices misaligned")
    return _cmi(probs_ys, probs_y, labels)


def cmi_suf(probs_ys, probs_s, labels) -> float:
    if _p(probs_ys).shape != _p(probs_s).shape:
        raise ValueError("probability matrices misaligned")
    return _cmi(probs_ys, probs_s, labels)


def normalize(value: float, normalizer: float) -> float | None:
    """``value / normalizer``, or ``None`` when the normaliser is ~0."""
    if normalizer <= NORMALIZER_FLOOR:
        return None
    return value / normalizer


def nmi_ind(mi: float, entropy: float) -> float:
    if entropy <= 0:
        raise ValueError("entropy of the sensitive attribute must be positive")
    return mi / entropy


def nmi_sep(cmi: float, cond_entropy_a_given_y: float) -> float | None:
    return normalize(cmi, cond_entropy_a_given_y)


def nmi_suf(cmi: float, cond_entropy_a_given_s: float) -> float | None:
    return normalize(cmi, cond_entropy_a_given_s)


def mi_measures(probs_s, probs_y, probs_ys, labels, counts: GroupCounts) -> MiMeasures:
    h = entropy_a(counts)
    h_y = cond_entropy(probs_y, labels)
    h_s = cond_entropy(probs_s, labels)
    i_ind = mi_ind(probs_s, labels, counts)
    i_sep = cmi_sep(probs_ys, probs_y, labels)
    i_suf = cmi_suf(probs_ys, probs_s, labels)
    return MiMeasures(
        entropy_a=h,
        cond_entropy_a_given_y=h_y,
        cond_entropy_a_given_s=h_s,
        mi_ind=i_ind,
        cmi_sep=i_sep,
        cmi_suf=i_suf,
        nmi_ind=normalize(i_ind, h),
        nmi_sep=nmi_sep(i_sep, h_y),
        nmi_suf=nmi_suf(i_suf, h_s),
    )
