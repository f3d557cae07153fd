"""Audit the four simulated scenarios over several seeds and print a table.

Columns: balanced accuracy of the S, Y and
(S, Y) classifiers, the three density ratios and the three normalised MI
measures.  Each cell is the mean over seeds, with the standard deviation in
parentheses when more than one seed is run.

    python3 scripts/scenario_table.py --seeds 0 1 2 3 4
    python3 scripts/scenario_table.py --csv scenarios.csv
"""

import argparse
import csv
import sys
import time

import numpy as np

from regfair.audit import AuditConfig
from regfair.synthetic import KINDS, TABLE_NAMES, scenario_table

COLUMNS = (
    ("BA S", "balanced_accuracy_s"),
    ("BA Y", "balanced_accuracy_y"),
    ("BA S,Y", "balanced_accuracy_ys"),
    ("a_ind", "ratio_ind"),
    ("a_sep", "ratio_sep"),
    ("a_suf", "ratio_suf"),
    ("M_ind", "nmi_ind"),
    ("M_sep", "nmi_sep"),
    ("M_suf", "nmi_suf"),
)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2, 3, 4])
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--p", type=float, default=0.7, help="P(a = 1)")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--basis", type=int, default=100)
    p.add_argument("--l2", type=float, default=1e-2)
    p.add_argument("--bandwidth-factor", type=float, default=0.3)
    p.add_argument("--csv", help="also write per-seed values here")
    args = p.parse_args(argv)

    values = {kind: {field: [] for _, field in COLUMNS} for kind in KINDS}
    per_seed = []
    for seed in args.seeds:
        t0 = time.perf_counter()
        config = AuditConfig(n_folds=args.folds, n_basis=args.basis, l2_strength=args.l2,
                             seed=seed, bandwidth_factor=args.bandwidth_factor)
        table = scenario_table(seed, config, n=args.n, p_a1=args.p)
        for kind, rep in table.items():
            row = {"seed": seed, "scenario": kind}
            for _, field in COLUMNS:
                values[kind][field].append(getattr(rep, field))
                row[field] = getattr(rep, field)
            per_seed.append(row)
        print(f"seed {seed}: {time.perf_counter() - t0:.1f}s", file=sys.stderr)

    width = max(len(TABLE_NAMES[k]) for k in KINDS)
    cell = 15 if len(args.seeds) > 1 else 7
    print(" " * width + " | " + " ".join(f"{h:>{cell}}" for h, _ in COLUMNS))
    for kind in KINDS:
        cells = []
        for _, field in COLUMNS:
            v = np.array(values[kind][field], dtype=float)
            cells.append(f"{v.mean():.3f} ({v.std():.3f})" if v.size > 1 else f"{v[0]:.3f}")
        print(f"{TABLE_NAMES[kind]:>{width}} | " + " ".join(f"{c:>{cell}}" for c in cells))

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.DictWriter(fh, ["seed", "scenario", *(f for _, f in COLUMNS)], lineterminator="\n")
            w.writeheader()
            w.writerows(per_seed)


if __name__ == "__main__":
    main()
