"""Linear regression with a convex group-fairness penalty, and a sweep over its weight.

The penalty compares predictions across sensitive groups for pairs of
instances with similar targets::

    lam * [ 1/(N0 N1) * sum_{i in A=1} sum_{j in A=0} g(y_i - y_j) (w.x_i - w.x_j) ]^2

with ``g(u) = exp(-u^2 / (2 h^2))``.  Signed differences cancel inside the
square, so only the group-level imbalance is penalised.  The bracket is the
linear form ``d.w`` for a fixed vector ``d``, so the whole objective is a
quadratic in ``w`` and is solved exactly from its normal equations.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .audit import AuditConfig, run_audit
from .core import DataError, FairnessReport, validate_dataset

RIDGE = 1e-8
# UCI column layout when the file has no header row.
UCI_SENSITIVE_INDEX = 7
UCI_NON_PREDICTIVE = 5
UCI_N_COLUMNS = 128


@dataclass(frozen=True)
class TrainingSet:
    features: np.ndarray
    target: np.ndarray
    sensitive: np.ndarray
    feature_names: tuple = ()

    def __post_init__(self):
        if not (self.features.shape[0] == self.target.shape[0] == self.sensitive.shape[0]):
            raise DataError("features, target and sensitive must have the same length")
        if not (np.all(np.isfinite(self.features)) and np.all(np.isfinite(self.target))):
            raise DataError("training data contains non-finite values")
        if set(np.unique(self.sensitive)) != {0, 1}:
            raise DataError("training data needs both sensitive classes 0 and 1")

    @property
    def n(self) -> int:
        return self.target.shape[0]

    def subset(self, idx) -> "TrainingSet":
        return TrainingSet(self.features[idx], self.target[idx], self.sensitive[idx], self.feature_names)


@dataclass(frozen=True)
class LinearModel:
    weights: np.ndarray
    intercept: float
    lam: float
    kernel_bandwidth: float

    def predict(self, features) -> np.ndarray:
        return np.asarray(features) @ self.weights + self.intercept


@dataclass(frozen=True)
class SweepResult:
    lambdas: np.ndarray
    reports: tuple
    rmse: np.ndarray
    penalty: np.ndarray

    CSV_HEADER = ("lambda", "rmse", "ratio_ind", "ratio_sep", "ratio_suf",
                  "nmi_ind", "nmi_sep", "nmi_suf")

    def rows(self):
        for lam, rep, err in zip(self.lambdas, self.reports, self.rmse):
            yield (float(lam), float(err), rep.ratio_ind, rep.ratio_sep, rep.ratio_suf,
                   rep.nmi_ind, rep.nmi_sep, rep.nmi_suf)

    def column(self, name: str) -> np.ndarray:
        i = self.CSV_HEADER.index(name)
        return np.array([np.nan if r[i] is None else r[i] for r in self.rows()], dtype=float)


def default_lambda_grid() -> np.ndarray:
    return np.concatenate([[0.0], np.logspace(-4, 2, 16)])


def group_direction(train: TrainingSet, kernel_bandwidth: float) -> np.ndarray:
    """The vector ``d`` such that the bracketed penalty term equals ``d.w``."""
    a = train.sensitive
    x1, x0 = train.features[a == 1], train.features[a == 0]
    y1, y0 = train.target[a == 1], train.target[a == 0]
    g = np.exp(-((y1[:, None] - y0[None, :]) ** 2) / (2.0 * kernel_bandwidth**2))
    return (g.sum(axis=1) @ x1 - g.sum(axis=0) @ x0) / (x1.shape[0] * x0.shape[0])


def penalty_term(model: LinearModel, train: TrainingSet) -> float:
    """Signed cross-group term inside the square (before weighting by lambda)."""
    return float(group_direction(train, model.kernel_bandwidth) @ model.weights)


def berk_objective(weights, intercept, train: TrainingSet, lam, kernel_bandwidth):
    r = train.target - train.features @ weights - intercept
    d = group_direction(train, kernel_bandwidth)
    return float(np.mean(r**2) + lam * (d @ weights) ** 2)


def berk_gradient(weights, intercept, train: TrainingSet, lam, kernel_bandwidth):
    n = train.n
    r = train.target - train.features @ weights - intercept
    d = group_direction(train, kernel_bandwidth)
    gw = -2.0 / n * train.features.T @ r + 2.0 * lam * (d @ weights) * d
    gb = -2.0 / n * r.sum()
    return np.concatenate([gw, [gb]])


def fit_berk(train: TrainingSet, lam: float, kernel_bandwidth: float | None = None) -> LinearModel:
    """Exact minimiser of mean squared error plus the group penalty.

    ``kernel_bandwidth`` defaults to the standard deviation of the target.
    A ridge of 1e-8 keeps rank-deficient designs solvable; a few steps of
    iterative refinement then recover the unridged optimum on full-rank designs.
    """
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    h = float(np.std(train.target)) if kernel_bandwidth is None else float(kernel_bandwidth)
    if h <= 0:
        h = 1.0
    x, y = train.features, train.target
    xm, ym = x.mean(axis=0), y.mean()
    xc, yc = x - xm, y - ym
    d = group_direction(train, h)
    exact = xc.T @ xc / train.n + lam * np.outer(d, d)
    rhs = xc.T @ yc / train.n
    lhs = exact + RIDGE * np.eye(x.shape[1])
    w = np.linalg.solve(lhs, rhs)
    # refine towards the unridged optimum; the ridge only preconditions
    for _ in range(3):
        w = w + np.linalg.solve(lhs, rhs - exact @ w)
    return LinearModel(weights=w, intercept=float(ym - xm @ w), lam=float(lam), kernel_bandwidth=h)


def split_train_audit(sensitive, train_fraction: float = 0.7, seed: int = 0):
    """Stratified split by sensitive class; returns ``(train_idx, audit_idx)``."""
    rng = np.random.default_rng(seed)
    sensitive = np.asarray(sensitive)
    tr, te = [], []
    for c in np.unique(sensitive):
        idx = rng.permutation(np.flatnonzero(sensitive == c))
        cut = int(round(train_fraction * idx.size))
        tr.append(idx[:cut])
        te.append(idx[cut:])
    return np.sort(np.concatenate(tr)), np.sort(np.concatenate(te))


def sweep(
    data: TrainingSet,
    lambdas=None,
    config: AuditConfig = AuditConfig(),
    kernel_bandwidth: float | None = None,
    train_fraction: float = 0.7,
) -> SweepResult:
    """Fit at each lambda, then audit the held-out predictions.

    The split is drawn once from ``config.seed`` and shared by every lambda.
    """
    lambdas = default_lambda_grid() if lambdas is None else np.asarray(lambdas, dtype=float)
    if lambdas.size == 0 or np.any(np.diff(lambdas) <= 0) or np.any(lambdas < 0):
        raise ValueError("lambdas must be non-empty, nonnegative and strictly increasing")
    tr_idx, te_idx = split_train_audit(data.sensitive, train_fraction, config.seed)
    train, held = data.subset(tr_idx), data.subset(te_idx)
    reports: list[FairnessReport] = []
    rmse, pen = [], []
    for lam in lambdas:
        model = fit_berk(train, lam, kernel_bandwidth)
        pred = model.predict(held.features)
        rmse.append(math.sqrt(float(np.mean((held.target - pred) ** 2))))
        pen.append(penalty_term(model, train) ** 2)
        ds = validate_dataset(held.target, pred, held.sensitive, n_folds=config.n_folds)
        reports.append(run_audit(ds, config))
    return SweepResult(lambdas=lambdas, reports=tuple(reports), rmse=np.array(rmse), penalty=np.array(pen))


def load_communities(
    path,
    target_col: str = "ViolentCrimesPerPop",
    sensitive_col: str = "racepctblack",
    threshold: float = 0.5,
    drop_cols=("state", "county", "community", "communityname", "fold"),
) -> TrainingSet:
    """Read the UCI Communities and Crime table.

    Accepts the raw headerless ``communities.data`` layout (128 columns) or
    a CSV with a header row.  ``?`` marks missing values; any feature column
    with a missing or non-numeric entry is dropped.  Communities whose
    ``sensitive_col`` value exceeds ``threshold`` are labelled protected (1).
    Features are standardised and include the sensitive column itself.
    """
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise DataError(f"{path}: empty file")
    if _is_header(rows[0]):
        header, body = [c.strip() for c in rows[0]], rows[1:]
    elif len(rows[0]) == UCI_N_COLUMNS:
        header = [f"col{i}" for i in range(UCI_N_COLUMNS)]
        header[UCI_SENSITIVE_INDEX] = sensitive_col
        header[-1] = target_col
        drop_cols = tuple(header[:UCI_NON_PREDICTIVE])
        body = rows
    else:
        raise DataError(f"{path}: no header row and not the {UCI_N_COLUMNS}-column UCI layout")
    for col in (target_col, sensitive_col):
        if col not in header:
            raise DataError(f"{path}: missing required column {col!r}")
    if any(len(r) != len(header) for r in body):
        raise DataError(f"{path}: ragged rows")

    cols = {name: [r[i].strip() for r in body] for i, name in enumerate(header)}
    target = _numeric(cols[target_col])
    pct = _numeric(cols[sensitive_col])
    if target is None or pct is None or np.isnan(target).any() or np.isnan(pct).any():
        raise DataError("target and sensitive columns must be fully numeric")
    sensitive = (pct > threshold).astype(np.int64)
    if sensitive.min() == sensitive.max():
        raise DataError(f"thresholding {sensitive_col} at {threshold} leaves one class empty")

    names, feats = [], []
    for name in header:
        if name == target_col or name in drop_cols:
            continue
        v = _numeric(cols[name])
        if v is None or np.isnan(v).any():
            continue
        names.append(name)
        feats.append(v)
    if not feats:
        raise DataError("no complete numeric feature columns")
    x = np.column_stack(feats)
    sd = x.std(axis=0)
    x = (x - x.mean(axis=0)) / np.where(sd > 0, sd, 1.0)
    return TrainingSet(features=x, target=target, sensitive=sensitive, feature_names=tuple(names))


def _is_header(row) -> bool:
    # The raw UCI rows hold one string column (communityname), so a header
    # is recognised by a majority of non-numeric, non-missing cells.
    labels = [c for c in row if c.strip() not in ("", "?") and _not_float(c)]
    return len(labels) > len(row) // 2


def _not_float(cell) -> bool:
    try:
        float(cell)
        return False
    except ValueError:
        return True


def _numeric(values) -> np.ndarray | None:
    out = np.empty(len(values))
    for i, v in enumerate(values):
        if v in ("?", ""):
            out[i] = np.nan
            continue
        try:
            out[i] = float(v)
        except ValueError:
            return None
    return out


def group_shift_surrogate(
    n: int = 2000, n_features: int = 8, p_protected: float = 0.3, shift: float = 3.0,
    noise: float = 1.5, signal: float = 1.0, seed: int = 0,
) -> TrainingSet:
    """Synthetic stand-in for Communities and Crime with group-shifted targets.

    One feature is a noisy proxy of the sensitive attribute, and the target
    carries a group offset, so an unconstrained least-squares fit leans on
    the proxy.
    """
    rng = np.random.default_rng(seed)
    a = (rng.random(n) < p_protected).astype(np.int64)
    x = rng.standard_normal((n, n_features))
    x[:, 0] = a + 0.1 * rng.standard_normal(n)
    beta = signal * np.linspace(1.0, 0.2, n_features)
    beta[0] = 0.0
    y = x @ beta + shift * a + noise * rng.standard_normal(n)
    sd = x.std(axis=0)
    x = (x - x.mean(axis=0)) / sd
    return TrainingSet(features=x, target=y, sensitive=a, feature_names=tuple(f"x{i}" for i in range(n_features)))
