"""The four simulated regression-fairness scenarios.

Every scenario draws ``y ~ Uniform(-10, 10)`` and ``a ~ Bernoulli(p_a1)``
and then a mock prediction ``s`` around ``y``:

=============== ==============================================================
fair            s ~ N(y, 1.5^2) for both groups
score_mean      s ~ N(y - 4, 1.5^2) if a = 1, N(y + 4, 1.5^2) if a = 0
target_mean     s ~ N(y, 1.5^2); the returned target is then y + 4 (a = 0)
                or y - 4 (a = 1)
score_variance  s ~ N(y, 1.5^2) if a = 1, N(y, 6^2) if a = 0
=============== ==============================================================

Randomness comes from numpy's PCG64.  ``SeedSequence(seed).spawn(3)`` gives
three independent child streams used, in order, for the targets, the
sensitive labels and the score noise, so changing one draw never shifts the
others.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import AuditDataset, validate_dataset

KINDS = ("fair", "score_mean", "target_mean", "score_variance")
TABLE_NAMES = {
    "fair": "Fair",
    "score_mean": "Score mean",
    "target_mean": "Target mean",
    "score_variance": "Score variance",
}


@dataclass(frozen=True)
class ScenarioSpec:
    kind: str
    n: int = 1000
    p_a1: float = 0.7
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown scenario {self.kind!r}; expected one of {KINDS}")
        if not 0 < self.p_a1 < 1:
            raise ValueError("p_a1 must lie in (0, 1)")
        if self.n < 2:
            raise ValueError("n must be >= 2")


def streams(seed: int) -> tuple[np.random.Generator, ...]:
    return tuple(np.random.Generator(np.random.PCG64(s)) for s in np.random.SeedSequence(seed).spawn(3))


def sample(spec: ScenarioSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Raw ``(y, s, a)`` draws for ``spec``."""
    g_y, g_a, g_noise = streams(spec.seed)
    y = g_y.uniform(-10.0, 10.0, size=spec.n)
    a = (g_a.random(spec.n) < spec.p_a1).astype(np.int64)
    noise = g_noise.standard_normal(spec.n)
    if spec.kind == "fair":
        s = y + 1.5 * noise
    elif spec.kind == "score_mean":
        s = np.where(a == 1, y - 4.0, y + 4.0) + 1.5 * noise
    elif spec.kind == "target_mean":
        s = y + 1.5 * noise
        y = np.where(a == 0, y + 4.0, y - 4.0)
    else:
        s = y + np.where(a == 0, 6.0, 1.5) * noise
    return y, s, a


def generate(spec: ScenarioSpec) -> AuditDataset:
    y, s, a = sample(spec)
    return validate_dataset(y, s, a)


def scenario_table(seed: int = 0, config=None, n: int = 1000, p_a1: float = 0.7):
    """Audit all four scenarios, returned as ``{kind: FairnessReport}`` in table order."""
    from .audit import AuditConfig, run_audit

    config = config or AuditConfig(seed=seed)
    return {
        kind: run_audit(generate(ScenarioSpec(kind, n=n, p_a1=p_a1, seed=seed)), config)
        for kind in KINDS
    }
