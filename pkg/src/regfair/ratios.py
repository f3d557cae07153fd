"""Expected density-ratio measures for a binary sensitive attribute.

Each measure is the empirical mean over *all* instances of a posterior-odds
ratio, so a perfectly fair score gives 1.  The averages can be swamped by a
single instance whose denominator probability is near the clamp floor;
``dominated_fraction`` reports the largest single-term share of each sum so
callers can flag that case.  A value near 1 does not certify fairness: two
groups treated unfairly in equal and opposite amounts also average to 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classifier import ProbabilityMatrix
from .core import GroupCounts

DOMINATION_THRESHOLD = 0.5


class UnsupportedClasses(ValueError):
    """Density-ratio measures are only defined for two sensitive classes."""


@dataclass(frozen=True)
class RatioMeasures:
    a_ind: float
    a_sep: float
    a_suf: float
    dominated_fraction: float

    @property
    def dominated(self) -> bool:
        return self.dominated_fraction > DOMINATION_THRESHOLD


def _p1(probs) -> np.ndarray:
    p = probs.probs if isinstance(probs, ProbabilityMatrix) else np.asarray(probs, dtype=np.float64)
    if p.ndim == 1:
        return p
    if p.shape[1] != 2:
        raise UnsupportedClasses(f"ratio measures need K=2, got K={p.shape[1]}")
    return p[:, 1]


def _odds(p1: np.ndarray) -> np.ndarray:
    return p1 / (1.0 - p1)


def _aligned(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValueError(f"probability rows misaligned: {a.shape} vs {b.shape}")


def ind_terms(probs_s, counts: GroupCounts) -> np.ndarray:
    if counts.counts.size != 2:
        raise UnsupportedClasses(f"ratio measures need K=2, got K={counts.counts.size}")
    n0, n1 = counts.counts
    return (n0 / n1) * _odds(_p1(probs_s))


def sep_terms(probs_ys, probs_y) -> np.ndarray:
    joint, marg = _p1(probs_ys), _p1(probs_y)
    _aligned(joint, marg)
    return _odds(joint) / _odds(marg)


def ratio_ind(probs_s, counts: GroupCounts) -> float:
    """``(N0 / (N1 N)) * sum_i u(1|s_i) / (1 - u(1|s_i))``."""
    return float(np.mean(ind_terms(probs_s, counts)))


def ratio_sep(probs_ys, probs_y) -> float:
    """Mean over instances of joint odds times inverse target-only odds."""
    return float(np.mean(sep_terms(probs_ys, probs_y)))


def ratio_suf(probs_ys, probs_s) -> float:
    """As :func:`ratio_sep` with the score-only classifier in the denominator."""
    return float(np.mean(sep_terms(probs_ys, probs_s)))


def max_term_share(terms: np.ndarray) -> float:
    total = terms.sum()
    return float(terms.max() / total) if total > 0 else 0.0


def ratio_measures(probs_s, probs_y, probs_ys, counts: GroupCounts) -> RatioMeasures:
    t_ind = ind_terms(probs_s, counts)
    t_sep = sep_terms(probs_ys, probs_y)
    t_suf = sep_terms(probs_ys, probs_s)
    return RatioMeasures(
        a_ind=float(t_ind.mean()),
        a_sep=float(t_sep.mean()),
        a_suf=float(t_suf.mean()),
        dominated_fraction=max(max_term_share(t) for t in (t_ind, t_sep, t_suf)),
    )
