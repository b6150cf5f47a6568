"""Command-line entry point ``asp``.

    asp run --alg rls --n 5 --m 50 --iters 200 --out rls.csv
    asp compare --algs lms,nlms,rls --out fig2.csv
    asp ops --alg nlms --n 5

Exit status: 0 on success, 2 for configuration errors, 3 for numerical
failures (non-convergence, degenerate rank-1 updates, singular systems).
"""
import argparse
import sys
from contextlib import contextmanager

from .errors import ASPError, ConfigError, ConfigMismatch, DimensionMismatch
from .sysid import (
    ALGORITHMS,
    ExperimentConfig,
    compare_algorithms,
    count_ops,
    run_experiment,
    write_comparison_csv,
    write_curve_csv,
)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def _add_experiment_args(p):
    p.add_argument("--n", type=int, default=5, help="filter length")
    p.add_argument("--m", type=int, default=50, help="number of data rows")
    p.add_argument("--iters", type=int, default=2000)
    p.add_argument("--mu", type=float, default=0.05, help="LMS / SD step size")
    p.add_argument("--eps", type=float, default=1e-12, help="NLMS regularization")
    p.add_argument("--delta", type=float, default=1e-6, help="RLS / Kalman initial regularization")
    p.add_argument("--noise", type=float, default=0.01, help="observation noise std-dev")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=32)
    p.add_argument("--ap-order", type=int, default=None, help="affine projection block size")
    p.add_argument("--out", default="-", help="output CSV path ('-' for stdout)")


def build_parser():
    parser = argparse.ArgumentParser(prog="asp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="learning curve of one algorithm")
    run.add_argument("--alg", required=True, choices=ALGORITHMS)
    _add_experiment_args(run)

    cmp_ = sub.add_parser("compare", help="several algorithms on identical data")
    cmp_.add_argument("--algs", required=True, help="comma-separated algorithm names")
    _add_experiment_args(cmp_)

    ops = sub.add_parser("ops", help="per-iteration multiply-accumulate count")
    ops.add_argument("--alg", required=True)
    ops.add_argument("--n", type=int, required=True)
    return parser


def _config(args, alg):
    return ExperimentConfig(alg, n=args.n, m=args.m, iters=args.iters, mu=args.mu, eps=args.eps,
                            delta=args.delta, noise_std=args.noise, seed=args.seed,
                            trials=args.trials, ap_order=args.ap_order)


@contextmanager
def _output(path):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            curve = run_experiment(_config(args, args.alg))
            with _output(args.out) as fh:
                write_curve_csv(curve, fh)
        elif args.command == "compare":
            algs = [a.strip() for a in args.algs.split(",") if a.strip()]
            results = compare_algorithms([_config(args, a) for a in algs], args.seed)
            with _output(args.out) as fh:
                write_comparison_csv(results, fh)
        else:
            print(count_ops(args.alg, args.n))
    except (ConfigError, ConfigMismatch, DimensionMismatch) as err:
        print(f"asp: configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (ASPError, ArithmeticError) as err:
        print(f"asp: numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
