"""Command-line entry point: ``regfair audit | simulate | sweep``.

Exit codes: 0 success, 2 usage or data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import reports
from .audit import AuditConfig, run_audit
from .berk import default_lambda_grid, group_shift_surrogate, load_communities, sweep
from .classifier import FitError
from .core import DataError, validate_dataset
from .synthetic import KINDS, ScenarioSpec, sample

log = logging.getLogger("regfair")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3


class UsageError(Exception):
    pass


def _add_audit_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("audit configuration")
    g.add_argument("--folds", type=int, default=10, help="cross-validation folds (default 10)")
    g.add_argument("--basis", type=int, default=100, help="number of RBF centres (default 100)")
    g.add_argument("--l2", type=float, default=1e-2, help="L2 penalty of the classifiers")
    g.add_argument("--bandwidth-factor", type=float, default=0.3,
                   help="RBF bandwidth as a multiple of the median pairwise distance")
    g.add_argument("--epsilon", type=float, default=1e-6, help="probability clamp")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--held-in", action="store_true", help="train and predict on the same data")
    g.add_argument("--clamp-nmi", action="store_true", help="report negative NMI as 0")


def _config(args) -> AuditConfig:
    try:
        return AuditConfig(
            n_folds=args.folds,
            n_basis=args.basis,
            l2_strength=args.l2,
            clamp_epsilon=args.epsilon,
            seed=args.seed,
            held_in=args.held_in,
            clamp_negative_nmi=args.clamp_nmi,
            bandwidth_factor=args.bandwidth_factor,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _cols(spec: str) -> tuple:
    return tuple(c.strip() for c in spec.split(",") if c.strip())


def cmd_audit(args) -> int:
    config = _config(args)
    folds = 1 if config.held_in else config.n_folds
    ds = reports.read_dataset_csv(
        args.csv, _cols(args.target_col), _cols(args.score_col), args.sensitive_col, n_folds=folds
    )
    report = run_audit(ds, config)
    _emit(reports.dumps_report(report, config.to_dict()), args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    config = _config(args)
    if args.kind not in KINDS:
        raise UsageError(f"unknown scenario {args.kind!r}; choose from {', '.join(KINDS)}")
    y, s, a = sample(ScenarioSpec(args.kind, n=args.n, p_a1=args.p, seed=args.seed))
    # Audit exactly what lands in the CSV so a re-audit of the file matches.
    data_text = reports.dataset_to_csv(y, s, a)
    ds = validate_dataset(y, s, [str(v) for v in a], n_folds=1 if config.held_in else config.n_folds)
    report = run_audit(ds, config)
    Path(args.data_out).write_text(data_text, encoding="utf-8", newline="\n")
    if args.plot_out:
        Path(args.plot_out).write_text(reports.plot_data_csv(y, s, a), encoding="utf-8", newline="\n")
    _emit(reports.dumps_report(report, config.to_dict()), args.out)
    return EXIT_OK


def _lambda_grid(args) -> np.ndarray:
    if args.lambdas:
        try:
            return np.array([float(v) for v in args.lambdas.split(",")])
        except ValueError:
            raise UsageError(f"bad --lambdas {args.lambdas!r}") from None
    if args.lambda_count is None:
        return default_lambda_grid()
    grid = np.logspace(np.log10(args.lambda_min), np.log10(args.lambda_max), args.lambda_count)
    return np.concatenate([[0.0], grid])


def cmd_sweep(args) -> int:
    config = _config(args)
    if args.source == "surrogate":
        data = group_shift_surrogate(seed=args.seed)
    else:
        if not Path(args.source).is_file():
            raise UsageError(f"dataset file not found: {args.source}")
        data = load_communities(args.source)
        log.info("loaded %d communities with %d features", data.n, data.features.shape[1])
    try:
        result = sweep(data, _lambda_grid(args), config)
    except ValueError as exc:
        if isinstance(exc, DataError):
            raise
        raise UsageError(str(exc)) from None
    _emit(reports.sweep_to_csv(result), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="regfair",
        description="Audit regression scores for independence, separation and sufficiency.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("audit", help="audit a CSV of targets, scores and sensitive labels")
    p.add_argument("csv")
    p.add_argument("--target-col", default="y", help="comma-separated for vector targets")
    p.add_argument("--score-col", default="s", help="comma-separated for vector scores")
    p.add_argument("--sensitive-col", default="a")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    _add_audit_flags(p)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("simulate", help="generate and audit a simulated scenario")
    p.add_argument("kind", help=" | ".join(KINDS))
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--p", type=float, default=0.7, help="P(a = 1)")
    p.add_argument("--data-out", required=True, help="dataset CSV path")
    p.add_argument("--plot-out", help="plot-data CSV path")
    p.add_argument("--out", help="report JSON path (default stdout)")
    _add_audit_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="fairness vs regulariser weight for the group-penalised linear model")
    p.add_argument("source", help="UCI Communities and Crime file, or 'surrogate'")
    p.add_argument("--lambdas", help="explicit comma-separated grid")
    p.add_argument("--lambda-min", type=float, default=1e-4)
    p.add_argument("--lambda-max", type=float, default=1e2)
    p.add_argument("--lambda-count", type=int, help="log-spaced points (plus 0)")
    p.add_argument("--out", help="sweep CSV path (default stdout)")
    _add_audit_flags(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (UsageError, DataError, FileNotFoundError) as exc:
        print(f"regfair: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FitError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"regfair: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
