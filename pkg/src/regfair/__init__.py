"""Classifier-based fairness measures for regression scores.

Independence, separation and sufficiency are estimated from probabilistic
classifiers of the sensitive attribute trained on the score, the target and
both together.  See :func:`regfair.audit.run_audit` for the full pipeline.
"""

from .audit import AuditConfig, audit_with_probs, run_audit
from .core import AuditDataset, DataError, FairnessReport, GroupCounts, group_counts, validate_dataset

__version__ = "0.1.0"

__all__ = [
    "AuditConfig",
    "AuditDataset",
    "DataError",
    "FairnessReport",
    "GroupCounts",
    "audit_with_probs",
    "group_counts",
    "run_audit",
    "validate_dataset",
]
