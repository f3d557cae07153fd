"""Logistic regression on random radial basis features.

The auditor needs calibrated estimates of p(a | input).  We fit a multinomial
logistic model (cross-entropy is a proper loss) on Gaussian RBF features
whose centres are drawn from the data, and solve the convex objective with a
damped Newton iteration so results are deterministic.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

DEFAULT_N_BASIS = 100
DEFAULT_L2 = 1e-2
DEFAULT_EPSILON = 1e-6
# Audits use bumps at 0.3x the median pairwise distance; wider bumps underfit
# the sharp joint (y, s) boundaries of group-shifted scores.
DEFAULT_BANDWIDTH_FACTOR = 0.3
_MEDIAN_SUBSAMPLE = 500


class FitError(RuntimeError):
    """The optimiser failed to produce finite weights."""


@dataclass(frozen=True)
class RbfFeatureMap:
    """Gaussian bumps ``exp(-|z - c|^2 / (2 h^2))`` on standardised inputs ``z``."""

    centres: np.ndarray
    bandwidth: float
    mean: np.ndarray
    scale: np.ndarray
    include_bias: bool = True

    def __post_init__(self):
        if self.bandwidth <= 0:
            raise ValueError("bandwidth must be positive")
        if self.centres.ndim != 2 or self.centres.shape[0] < 1:
            raise ValueError("need at least one centre")
        if np.any(self.scale <= 0):
            raise ValueError("standardisation scales must be positive")

    @property
    def n_basis(self) -> int:
        return self.centres.shape[0]

    @property
    def n_features(self) -> int:
        return self.n_basis + int(self.include_bias)

    @property
    def input_dim(self) -> int:
        return self.centres.shape[1]

    def standardize(self, inputs) -> np.ndarray:
        x = np.asarray(inputs, dtype=np.float64)
        if x.ndim == 1:
            x = x[:, None]
        if x.shape[1] != self.input_dim:
            raise ValueError(
                f"input dimension {x.shape[1]} does not match feature map ({self.input_dim})"
            )
        return (x - self.mean) / self.scale

    def transform(self, inputs) -> np.ndarray:
        z = self.standardize(inputs)
        sq = (
            np.sum(z**2, axis=1)[:, None]
            - 2.0 * z @ self.centres.T
            + np.sum(self.centres**2, axis=1)[None, :]
        )
        np.maximum(sq, 0.0, out=sq)
        phi = np.exp(-sq / (2.0 * self.bandwidth**2))
        if self.include_bias:
            phi = np.hstack([np.ones((phi.shape[0], 1)), phi])
        return phi


def median_heuristic(z: np.ndarray, rng: np.random.Generator) -> float:
    """Median pairwise distance over at most 500 rows; 1.0 if degenerate."""
    if z.shape[0] > _MEDIAN_SUBSAMPLE:
        z = z[rng.choice(z.shape[0], _MEDIAN_SUBSAMPLE, replace=False)]
    iu = np.triu_indices(z.shape[0], k=1)
    if iu[0].size == 0:
        return 1.0
    d = np.sqrt(np.sum((z[iu[0]] - z[iu[1]]) ** 2, axis=1))
    h = float(np.median(d))
    return h if np.isfinite(h) and h > 0 else 1.0


def make_feature_map(
    inputs,
    n_basis: int = DEFAULT_N_BASIS,
    bandwidth: str | float = "median",
    seed: int = 0,
    include_bias: bool = True,
    bandwidth_factor: float = 1.0,
) -> RbfFeatureMap:
    """Build an RBF map with centres resampled (with replacement) from ``inputs``.

    ``bandwidth`` is either ``"median"`` for the median heuristic or a
    positive number in standardised units.  Either is multiplied by
    ``bandwidth_factor``.
    """
    if n_basis < 1:
        raise ValueError("n_basis must be >= 1")
    x = np.asarray(inputs, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    mean = x.mean(axis=0)
    scale = x.std(axis=0)
    if np.any(scale == 0):
        warnings.warn("zero-variance input dimension; using unit scale", RuntimeWarning)
        scale = np.where(scale == 0, 1.0, scale)
    z = (x - mean) / scale
    # Canonical row order: the map depends on the multiset of rows only.
    z = z[np.lexsort(z.T[::-1])]
    rng = np.random.default_rng(seed)
    centres = z[rng.integers(0, z.shape[0], size=n_basis)]
    if isinstance(bandwidth, str):
        if bandwidth != "median":
            raise ValueError(f"unknown bandwidth rule {bandwidth!r}")
        h = median_heuristic(z, rng)
    else:
        h = float(bandwidth)
    return RbfFeatureMap(
        centres=centres, bandwidth=h * bandwidth_factor, mean=mean, scale=scale, include_bias=include_bias
    )


@dataclass(frozen=True)
class ProbabilityMatrix:
    """Per-instance class probabilities, floored at ``clamp_epsilon``."""

    probs: np.ndarray
    clamp_epsilon: float = DEFAULT_EPSILON

    @classmethod
    def from_raw(cls, raw, clamp_epsilon: float = DEFAULT_EPSILON) -> "ProbabilityMatrix":
        return cls(clamp_probs(raw, clamp_epsilon), clamp_epsilon)

    @property
    def n_classes(self) -> int:
        return self.probs.shape[1]

    def __len__(self):
        return self.probs.shape[0]


def clamp_probs(raw, eps: float) -> np.ndarray:
    """Raise entries below ``eps`` and take the excess from the remaining mass.

    Rows stay normalised and every entry lands in ``[eps, 1 - (K-1) eps]``.
    For two classes this is exactly clipping p(1) to ``[eps, 1 - eps]``.
    """
    p = np.array(raw, dtype=np.float64)
    if p.ndim != 2:
        raise ValueError("probabilities must be an N x K matrix")
    if not 0 < eps < 1.0 / p.shape[1]:
        raise ValueError("clamp epsilon must lie in (0, 1/K)")
    q = np.maximum(p, eps)
    excess = q.sum(axis=1, keepdims=True) - 1.0
    free = q - eps
    q -= excess * free / free.sum(axis=1, keepdims=True)
    if p.shape[1] == 2:
        q[:, 1] = np.clip(p[:, 1], eps, 1.0 - eps)
        q[:, 0] = 1.0 - q[:, 1]
    return q


@dataclass(frozen=True)
class LogisticModel:
    """Weights are (M+1) x 1 for two classes, (M+1) x K otherwise."""

    weights: np.ndarray
    l2_strength: float
    feature_map: RbfFeatureMap
    n_classes: int
    n_iter: int = 0
    grad_norm: float = 0.0

    def logits(self, inputs) -> np.ndarray:
        return self.feature_map.transform(inputs) @ self.weights


def _softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def raw_probabilities(logits: np.ndarray, n_classes: int) -> np.ndarray:
    if n_classes == 2:
        p1 = _sigmoid(logits[:, 0])
        return np.column_stack([1.0 - p1, p1])
    return _softmax(logits)


def _penalty_mask(n_features: int, include_bias: bool) -> np.ndarray:
    mask = np.ones(n_features)
    if include_bias:
        mask[0] = 0.0
    return mask


def objective(weights, phi, labels, l2_strength, include_bias=True):
    """Mean cross-entropy plus ``l2/2 * |W|^2`` over non-bias rows.

    Returns ``(value, gradient)`` with the gradient shaped like ``weights``.
    """
    n = phi.shape[0]
    w = np.asarray(weights, dtype=np.float64)
    mask = _penalty_mask(phi.shape[1], include_bias)[:, None]
    z = phi @ w
    if w.shape[1] == 1:
        zz = z[:, 0]
        y = (labels == 1).astype(np.float64)
        # log(1 + exp(z)) - y z, computed stably
        loss = np.logaddexp(0.0, zz) - y * zz
        resid = (_sigmoid(zz) - y)[:, None]
    else:
        zmax = z.max(axis=1, keepdims=True)
        lse = zmax[:, 0] + np.log(np.exp(z - zmax).sum(axis=1))
        loss = lse - z[np.arange(n), labels]
        onehot = np.zeros_like(z)
        onehot[np.arange(n), labels] = 1.0
        resid = _softmax(z) - onehot
    value = loss.mean() + 0.5 * l2_strength * np.sum(mask * w**2)
    grad = phi.T @ resid / n + l2_strength * mask * w
    return float(value), grad


def _hessian(w, phi, l2_strength, mask):
    n, m = phi.shape
    z = phi @ w
    if w.shape[1] == 1:
        p = _sigmoid(z[:, 0])
        h = (phi * (p * (1 - p))[:, None]).T @ phi / n
        return h + np.diag(l2_strength * mask)
    k = w.shape[1]
    p = _softmax(z)
    h = np.empty((m * k, m * k))
    for a in range(k):
        for b in range(a, k):
            wts = p[:, a] * ((a == b) - p[:, b])
            blk = (phi * wts[:, None]).T @ phi / n
            if a == b:
                blk = blk + np.diag(l2_strength * mask)
            h[a * m:(a + 1) * m, b * m:(b + 1) * m] = blk
            h[b * m:(b + 1) * m, a * m:(a + 1) * m] = blk.T
    return h


def fit(
    feature_map: RbfFeatureMap,
    inputs,
    labels,
    l2_strength: float = DEFAULT_L2,
    n_classes: int | None = None,
    tol: float = 1e-6,
    max_iter: int = 500,
) -> LogisticModel:
    """Minimise penalised multinomial cross-entropy by damped Newton steps.

    Stops when the gradient norm drops below ``tol`` or after ``max_iter``
    iterations.  Column-major flattening is used so that each class block
    of the Hessian is contiguous.
    """
    labels = np.asarray(labels, dtype=np.int64)
    k = int(n_classes or labels.max() + 1)
    if np.unique(labels).size < 2:
        raise ValueError("need at least two classes present in labels")
    if l2_strength < 0:
        raise ValueError("l2_strength must be nonnegative")
    phi = feature_map.transform(inputs)
    if not np.all(np.isfinite(phi)):
        raise ValueError("non-finite features")
    m = phi.shape[1]
    cols = 1 if k == 2 else k
    mask = _penalty_mask(m, feature_map.include_bias)
    w = np.zeros((m, cols))
    value, grad = objective(w, phi, labels, l2_strength, feature_map.include_bias)
    it = 0
    gnorm = float(np.linalg.norm(grad))
    # Tiny ridge keeps the solve defined along the softmax shift direction
    # and for unpenalised bias columns under separation.
    jitter = 1e-10 * np.eye(m * cols)
    while gnorm > tol and it < max_iter:
        h = _hessian(w, phi, l2_strength, mask)
        g = grad.ravel(order="F")
        try:
            step = np.linalg.solve(h + jitter, -g)
        except np.linalg.LinAlgError:
            step = -g
        step = step.reshape((m, cols), order="F")
        slope = float(g @ step.ravel(order="F"))
        if slope >= 0:
            step, slope = -grad, -float(np.sum(grad**2))
        t = 1.0
        while True:
            cand = w + t * step
            cval, cgrad = objective(cand, phi, labels, l2_strength, feature_map.include_bias)
            if cval <= value + 1e-4 * t * slope or t < 1e-12:
                break
            t *= 0.5
        if cval > value and t < 1e-12:
            break
        w, value, grad = cand, cval, cgrad
        gnorm = float(np.linalg.norm(grad))
        it += 1
    if not np.all(np.isfinite(w)):
        raise FitError("logistic fit diverged")
    return LogisticModel(
        weights=w,
        l2_strength=l2_strength,
        feature_map=feature_map,
        n_classes=k,
        n_iter=it,
        grad_norm=gnorm,
    )


def predict_proba(
    model: LogisticModel, inputs, clamp_epsilon: float = DEFAULT_EPSILON
) -> ProbabilityMatrix:
    raw = raw_probabilities(model.logits(inputs), model.n_classes)
    return ProbabilityMatrix.from_raw(raw, clamp_epsilon)


def train_classifier(
    inputs,
    labels,
    n_classes: int,
    n_basis: int = DEFAULT_N_BASIS,
    l2_strength: float = DEFAULT_L2,
    seed: int = 0,
    bandwidth_factor: float = DEFAULT_BANDWIDTH_FACTOR,
) -> LogisticModel:
    fmap = make_feature_map(inputs, n_basis=n_basis, seed=seed, bandwidth_factor=bandwidth_factor)
    return fit(fmap, inputs, labels, l2_strength=l2_strength, n_classes=n_classes)
