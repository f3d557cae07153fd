"""Fairness measures and RMSE against the weight of the group regulariser.

With the UCI Communities and Crime file the sweep uses the real data;
without it a synthetic surrogate with group-shifted targets stands in.

    python3 scripts/sweep.py --data communities.data --out sweep.csv
    python3 scripts/sweep.py --seeds 0 1 2
"""

import argparse
import sys

import numpy as np

from regfair.audit import AuditConfig
from regfair.berk import default_lambda_grid, group_shift_surrogate, load_communities, sweep
from regfair.reports import sweep_to_csv


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--data", help="UCI communities file; surrogate when omitted")
    p.add_argument("--seeds", type=int, nargs="+", default=[0])
    p.add_argument("--out", help="CSV for the first seed's sweep")
    args = p.parse_args(argv)

    lambdas = default_lambda_grid()
    summary = []
    for i, seed in enumerate(args.seeds):
        data = load_communities(args.data) if args.data else group_shift_surrogate(seed=seed)
        res = sweep(data, lambdas, AuditConfig(seed=seed))
        if i == 0:
            if args.data:
                print(f"{data.n} communities, {data.features.shape[1]} features, "
                      f"{int(data.sensitive.sum())} protected", file=sys.stderr)
            text = sweep_to_csv(res)
            if args.out:
                with open(args.out, "w", newline="") as fh:
                    fh.write(text)
            else:
                sys.stdout.write(text)
        sep, suf = res.column("nmi_sep"), res.column("nmi_suf")
        summary.append((seed, sep[0], sep[-1], suf[0], suf[-1], res.rmse[0], res.rmse[-1]))

    print("seed  M_sep(min->max)   M_suf(min->max)   rmse(min->max)", file=sys.stderr)
    for seed, s0, s1, u0, u1, r0, r1 in summary:
        print(f"{seed:4d}  {s0:6.3f} -> {s1:6.3f}  {u0:6.3f} -> {u1:6.3f}  {r0:6.3f} -> {r1:6.3f}",
              file=sys.stderr)
    if len(summary) > 1:
        arr = np.array(summary)[:, 1:]
        print("mean  {:6.3f} -> {:6.3f}  {:6.3f} -> {:6.3f}  {:6.3f} -> {:6.3f}".format(*arr.mean(axis=0)),
              file=sys.stderr)


if __name__ == "__main__":
    main()
