"""End-to-end audit: three held-out classifiers, then ratio and MI measures."""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .classifier import DEFAULT_BANDWIDTH_FACTOR, DEFAULT_EPSILON, DEFAULT_L2, DEFAULT_N_BASIS
from .core import AuditDataset, FairnessReport, group_counts
from .crossval import ClassifierConfig, balanced_accuracy, held_out_probs, stratified_folds
from .mi import mi_measures
from .ratios import DOMINATION_THRESHOLD, ratio_measures


@dataclass(frozen=True)
class AuditConfig:
    n_folds: int = 10
    n_basis: int = DEFAULT_N_BASIS
    l2_strength: float = DEFAULT_L2
    clamp_epsilon: float = DEFAULT_EPSILON
    seed: int = 0
    held_in: bool = False
    clamp_negative_nmi: bool = False
    bandwidth_factor: float = DEFAULT_BANDWIDTH_FACTOR

    def __post_init__(self):
        if self.n_folds < 1 or self.n_basis < 1:
            raise ValueError("n_folds and n_basis must be positive")
        if self.l2_strength < 0:
            raise ValueError("l2_strength must be nonnegative")
        if self.bandwidth_factor <= 0:
            raise ValueError("bandwidth_factor must be positive")
        if not 0 < self.clamp_epsilon < 0.5:
            raise ValueError("clamp_epsilon must lie in (0, 0.5)")

    @property
    def classifier(self) -> ClassifierConfig:
        return ClassifierConfig(self.n_basis, self.l2_strength, self.clamp_epsilon, self.bandwidth_factor)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class AuditResult:
    report: FairnessReport
    probs_s: object
    probs_y: object
    probs_ys: object


def audit_probabilities(dataset: AuditDataset, config: AuditConfig):
    """Held-out (or held-in) probabilities for the S, Y and (Y, S) classifiers."""
    folds = None
    if not config.held_in:
        folds = stratified_folds(dataset.sensitive, config.n_folds, config.seed)
    return tuple(
        held_out_probs(
            dataset, kind, config.n_folds, config.seed, config.classifier,
            folds=folds, held_in=config.held_in,
        )
        for kind in ("S", "Y", "YS")
    )


def run_audit(dataset: AuditDataset, config: AuditConfig = AuditConfig()) -> FairnessReport:
    return audit_with_probs(dataset, config).report


def audit_with_probs(dataset: AuditDataset, config: AuditConfig = AuditConfig()) -> AuditResult:
    probs_s, probs_y, probs_ys = audit_probabilities(dataset, config)
    return AuditResult(report_from_probs(dataset, probs_s, probs_y, probs_ys, config),
                       probs_s, probs_y, probs_ys)


def report_from_probs(dataset, probs_s, probs_y, probs_ys, config: AuditConfig = AuditConfig()):
    labels = dataset.sensitive
    counts = group_counts(dataset)
    notes = []
    ratios = None
    if dataset.k_classes == 2:
        ratios = ratio_measures(probs_s, probs_y, probs_ys, counts)
        if ratios.dominated:
            notes.append(
                f"ratio estimate dominated by a single instance "
                f"({ratios.dominated_fraction:.3g} of a sum > {DOMINATION_THRESHOLD})"
            )
    else:
        notes.append(f"K={dataset.k_classes} > 2: density-ratio measures omitted")

    mi = mi_measures(probs_s, probs_y, probs_ys, labels, counts)
    nmi = {"nmi_ind": mi.nmi_ind, "nmi_sep": mi.nmi_sep, "nmi_suf": mi.nmi_suf}
    for name, value in nmi.items():
        if value is None:
            notes.append(f"{name} undefined: conditional entropy normaliser is ~0")
        elif value < 0:
            notes.append(
                f"{name}={value:.4g} is negative; small negatives are estimation noise "
                f"from held-out probabilities"
            )
            if config.clamp_negative_nmi:
                nmi[name] = 0.0

    return FairnessReport(
        ratio_ind=ratios.a_ind if ratios else None,
        ratio_sep=ratios.a_sep if ratios else None,
        ratio_suf=ratios.a_suf if ratios else None,
        **nmi,
        balanced_accuracy_s=balanced_accuracy(probs_s, labels),
        balanced_accuracy_y=balanced_accuracy(probs_y, labels),
        balanced_accuracy_ys=balanced_accuracy(probs_ys, labels),
        n=dataset.n,
        k_classes=dataset.k_classes,
        diagnostics=tuple(notes),
    )
