"""Serialisation: report JSON, dataset / sweep / plot-data CSV.

CSV floats are written with 17 significant digits so every value survives a
round trip; JSON uses Python's shortest round-trip float repr.
"""

from __future__ import annotations

import csv
import io
import json

import numpy as np

from .core import AuditDataset, DataError, FairnessReport, validate_dataset

SCHEMA_VERSION = "1"
N_HIST_BINS = 30


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def report_to_dict(report: FairnessReport, config: dict | None = None) -> dict:
    return {
        "version": SCHEMA_VERSION,
        "config": dict(config or {}),
        "measures": report.measures(),
        "balanced_accuracy": report.balanced_accuracy(),
        "diagnostics": list(report.diagnostics),
    }


def report_from_dict(d: dict) -> FairnessReport:
    if d.get("version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported report version {d.get('version')!r}")
    m, ba = d["measures"], d["balanced_accuracy"]
    return FairnessReport(
        ratio_ind=m.get("ratio_ind"),
        ratio_sep=m.get("ratio_sep"),
        ratio_suf=m.get("ratio_suf"),
        nmi_ind=m["nmi_ind"],
        nmi_sep=m["nmi_sep"],
        nmi_suf=m["nmi_suf"],
        balanced_accuracy_s=ba["s"],
        balanced_accuracy_y=ba["y"],
        balanced_accuracy_ys=ba["ys"],
        n=m["n"],
        k_classes=m["k_classes"],
        diagnostics=tuple(d["diagnostics"]),
    )


def dumps_report(report: FairnessReport, config: dict | None = None) -> str:
    return json.dumps(report_to_dict(report, config), indent=2, allow_nan=False) + "\n"


def loads_report(text: str) -> FairnessReport:
    return report_from_dict(json.loads(text))


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def dataset_to_csv(y, s, a, columns=("y", "s", "a")) -> str:
    buf = io.StringIO()
    w = _writer(buf)
    w.writerow(columns)
    for yi, si, ai in zip(y, s, a):
        w.writerow([fmt(yi), fmt(si), ai])
    return buf.getvalue()


def read_dataset_csv(
    path,
    target_cols=("y",),
    score_cols=("s",),
    sensitive_col: str = "a",
    n_folds: int = 1,
) -> AuditDataset:
    """Load an audit CSV with a header row; numeric target/score columns."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in (*target_cols, *score_cols, sensitive_col):
            if col not in header:
                raise DataError(f"{path}: missing column {col!r} (have {header})")
        rows = list(reader)
    if not rows:
        raise DataError(f"{path}: no data rows")

    def numeric(cols):
        try:
            return np.array([[float(r[c]) for c in cols] for r in rows])
        except ValueError as exc:
            raise DataError(f"{path}: non-numeric value: {exc}") from None

    return validate_dataset(
        numeric(target_cols), numeric(score_cols), [r[sensitive_col].strip() for r in rows],
        n_folds=n_folds,
    )


def sweep_to_csv(result) -> str:
    buf = io.StringIO()
    w = _writer(buf)
    w.writerow(result.CSV_HEADER)
    for row in result.rows():
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def plot_data_csv(y, s, a, bins: int = N_HIST_BINS) -> str:
    """Scatter triples plus per-group histograms of y, s and s - y.

    ``point`` rows fill ``a, y, s``; ``hist`` rows fill ``a, variable,
    bin_lo, bin_hi, count``.  Bin edges are shared by both groups.
    """
    y, s, a = np.asarray(y, float), np.asarray(s, float), np.asarray(a)
    buf = io.StringIO()
    w = _writer(buf)
    w.writerow(["record", "a", "y", "s", "variable", "bin_lo", "bin_hi", "count"])
    for yi, si, ai in zip(y, s, a):
        w.writerow(["point", ai, fmt(yi), fmt(si), "", "", "", ""])
    for name, v in (("y", y), ("s", s), ("s_minus_y", s - y)):
        edges = np.histogram_bin_edges(v, bins=bins)
        for g in np.unique(a):
            counts, _ = np.histogram(v[a == g], bins=edges)
            for lo, hi, c in zip(edges[:-1], edges[1:], counts):
                w.writerow(["hist", g, "", "", name, fmt(lo), fmt(hi), int(c)])
    return buf.getvalue()
