import numpy as np


def frequency_probs(keys, a, k):
    """Row i gets the empirical p(a | key_i) over the whole sample."""
    keys = [tuple(np.atleast_1d(kk)) for kk in keys]
    a = np.asarray(a)
    out = np.zeros((len(keys), k))
    index = {}
    for i, kk in enumerate(keys):
        index.setdefault(kk, []).append(i)
    for rows in index.values():
        counts = np.bincount(a[rows], minlength=k)
        out[rows] = counts / counts.sum()
    return out


def base_rate_probs(a, k):
    a = np.asarray(a)
    return np.tile(np.bincount(a, minlength=k) / a.size, (a.size, 1))


def separable_four_points(eps=1e-6):
    """Four points, perfectly separated by a steep logistic in s.

    Returns ``(a, probs)`` with probabilities clamped at ``eps``; one instance
    sits at the clamp ceiling and carries almost all of the odds mass.
    """
    from regfair.classifier import ProbabilityMatrix

    a = np.array([0, 0, 1, 1])
    s = np.array([-2.0, -1.0, 1.0, 2.0])
    p1 = 1.0 / (1.0 + np.exp(-8.0 * s))
    return a, ProbabilityMatrix.from_raw(np.column_stack([1.0 - p1, p1]), eps)
