"""Command-line entry point.

Every output begins with ``#`` lines echoing the command and its parsed
flags, followed by either a matrix in the text format of :mod:`matmech.io`
or CSV. Exit status: 0 ok, 1 domain error, 2 usage error.
"""
from __future__ import annotations

import argparse
import sys
import warnings

import numpy as np

from . import io
from .analysis import range_query_errors, svb_sensitivity, total_error
from .errors import MatMechError
from .linalg import Strategy, l1_sensitivity
from .mechanism import PrivacyParams, matrix_mechanism
from .optimize import (
    OptimizerOptions,
    auto_augment,
    l2_optimal_profile,
    min_error_descent,
    min_sensitivity,
    svb_optimal_strategy,
    true_objective,
)
from .oracle import (
    growth_table,
    haar_equivalence_check,
    haar_structural_identity,
    least_squares_oracle,
    monte_carlo_error,
)
from .strategies import STRATEGY_NAMES, build_strategy
from .workloads import parse_workload

METHODS = ("svb", "l2", "descent", "minsens", "augment")
WORKLOAD_HELP = "ranges | predicates | identity | file:<path>"
STRATEGY_HELP = f"{' | '.join(STRATEGY_NAMES)} | file:<path>"


def _n_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="-", help="output path (default: stdout)")
    common.add_argument("--seed", type=int, default=0, help="64-bit seed (default 0)")
    common.add_argument("--threads", type=int, default=1, help="worker threads for optimizer/oracle (default 1)")

    p = argparse.ArgumentParser(prog="matmech", description="Matrix mechanism toolkit for linear counting queries.")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    s = sub.add_parser("workload", parents=[common], help="write a workload matrix")
    s.add_argument("--kind", required=True, choices=["ranges", "predicates", "identity"])
    s.add_argument("--n", type=int, required=True)

    s = sub.add_parser("strategy", parents=[common], help="write a strategy matrix")
    s.add_argument("--kind", required=True, choices=STRATEGY_NAMES)
    s.add_argument("--n", type=int, required=True)

    s = sub.add_parser(
        "analyze", parents=[common], help="exact per-query error",
        description="CSV columns: query_index,exact_mse. Summary lines (#) give total, max, "
        "sensitivity, l2_bound and svb_sensitivity.",
    )
    s.add_argument("--strategy", required=True, help=STRATEGY_HELP)
    s.add_argument("--workload", required=True, help=WORKLOAD_HELP)
    s.add_argument("--n", type=int)
    s.add_argument("--epsilon", type=float, default=1.0)

    s = sub.add_parser(
        "optimize", parents=[common], help="search for a low-error strategy",
        description="Prints CSV method,objective,sensitivity for every method and writes the "
        "strategy of --method to --strategy-out.",
    )
    s.add_argument("--workload", required=True, help=WORKLOAD_HELP)
    s.add_argument("--n", type=int)
    s.add_argument("--method", choices=METHODS, default="descent")
    s.add_argument("--strategy", help="input strategy for minsens/augment (default: descent result)")
    s.add_argument("--iters", type=int, default=2000)
    s.add_argument("--restarts", type=int, default=4)
    s.add_argument("--regularize", type=float, default=None, metavar="DELTA",
                   help="stack DELTA*I under a rank-deficient workload")
    s.add_argument("--strategy-out", help="write the selected strategy here")

    s = sub.add_parser(
        "answer", parents=[common], help="run the matrix mechanism on a data vector",
        description="CSV columns: query_index,noisy_value.",
    )
    s.add_argument("--strategy", required=True, help=STRATEGY_HELP)
    s.add_argument("--workload", default="identity", help=WORKLOAD_HELP + " (default identity)")
    s.add_argument("--n", type=int)
    s.add_argument("--data", required=True, help="count vector file (n x 1 matrix)")
    s.add_argument("--epsilon", type=float, required=True)
    s.add_argument("--delta", type=float, default=None, help="use Gaussian noise with this delta")

    s = sub.add_parser(
        "verify", parents=[common], help="run an independent check",
        description="mc: CSV query_index,empirical_mse,predicted_mse,rel_err. "
        "lsq: CSV index,oracle,estimate. haar: CSV index,haar_var,matrix_var,predicted. "
        "growth: CSV n,max_error,total_error,max_ratio,total_ratio.",
    )
    s.add_argument("--check", required=True, choices=["mc", "lsq", "haar", "growth"])
    s.add_argument("--n", type=int, default=4)
    s.add_argument("--trials", type=int, default=10**6)
    s.add_argument("--epsilon", type=float, default=1.0)
    s.add_argument("--strategy", default="hier", help=STRATEGY_HELP)
    s.add_argument("--workload", default="identity", help=WORKLOAD_HELP)
    s.add_argument("--n-list", type=_n_list, default=[16, 32, 64, 128, 256, 512, 1024])
    s.add_argument("--tolerance", type=float, default=None, help="pass threshold (default per check)")

    s = sub.add_parser(
        "bench", parents=[common], help="error of named strategies over a grid of n",
        description="CSV columns: n,strategy,workload,total_error,max_error.",
    )
    s.add_argument("--n-list", type=_n_list, required=True)
    s.add_argument("--strategies", default="identity,hier,wavelet")
    s.add_argument("--workload", default="ranges", help=WORKLOAD_HELP)
    s.add_argument("--epsilon", type=float, default=1.0)
    return p


def _header(args) -> list[str]:
    items = sorted((k, v) for k, v in vars(args).items() if k != "command")
    return [f"matmech {args.command}"] + [f"{k}={v}" for k, v in items]


def _fmt(v) -> str:
    return repr(float(v))


def _csv(args, columns: str, rows, summary=()) -> str:
    lines = [f"# {c}" for c in _header(args)]
    lines += [f"# {s}" for s in summary]
    lines.append(columns)
    lines += [",".join(str(c) if isinstance(c, (int, str)) else _fmt(c) for c in row) for row in rows]
    return "\n".join(lines) + "\n"


def _write(args, text: str) -> None:
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as f:
            f.write(text)


def _workload(name, n):
    return parse_workload(name, n).build()


def cmd_workload(args):
    W = _workload(args.kind, args.n)
    _write(args, io.format_matrix(W, _header(args)))


def cmd_strategy(args):
    _write(args, io.format_matrix(build_strategy(args.kind, args.n), _header(args)))


def cmd_analyze(args):
    A = Strategy(build_strategy(args.strategy, args.n), args.strategy)
    W = _workload(args.workload, args.n if args.n is not None else A.n)
    rep = total_error(A, W, args.epsilon, workload_id=args.workload)
    summary = [
        f"total={_fmt(rep.total)}",
        f"max={_fmt(rep.max)}",
        f"sensitivity={_fmt(A.sensitivity)}",
        f"l2_bound={_fmt(A.l2_bound)}",
        f"svb_sensitivity={_fmt(svb_sensitivity(A))}",
    ]
    _write(args, _csv(args, "query_index,exact_mse", enumerate(rep.per_query), summary))


def cmd_optimize(args):
    W = _workload(args.workload, args.n)
    opts = OptimizerOptions(
        max_iters=args.iters, restarts=args.restarts, seed=args.seed,
        threads=args.threads, regularization=args.regularize,
    )
    G = W.T @ W
    if args.regularize:
        from .optimize import prepare_workload

        Wr = prepare_workload(W, opts)
        G = Wr.T @ Wr
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        results = {
            "svb": svb_optimal_strategy(W, opts).strategy,
            "l2": l2_optimal_profile(W, opts).strategy,
            "descent": min_error_descent(W, opts).strategy,
        }
    base = Strategy(build_strategy(args.strategy, W.shape[1])) if args.strategy else results["descent"]
    results["minsens"] = min_sensitivity(base, opts)
    results["augment"] = auto_augment(base)
    rows = [(m, true_objective(results[m], G), l1_sensitivity(results[m].matrix)) for m in METHODS]
    _write(args, _csv(args, "method,objective,sensitivity", rows, [f"selected={args.method}"]))
    if args.strategy_out:
        io.write_matrix(results[args.method].matrix, args.strategy_out, _header(args))


def cmd_answer(args):
    x = io.read_vector(args.data)
    n = args.n if args.n is not None else x.shape[0]
    A = Strategy(build_strategy(args.strategy, n), args.strategy)
    W = _workload(args.workload, n)
    ans = matrix_mechanism(W, A, x, PrivacyParams(args.epsilon, args.delta), args.seed)
    summary = [f"mechanism={ans.mechanism}", f"noise_scale={_fmt(ans.noise_scale)}"]
    _write(args, _csv(args, "query_index,noisy_value", enumerate(ans.values), summary))


def cmd_verify(args):
    if args.check == "mc":
        A = build_strategy(args.strategy, args.n)
        W = _workload(args.workload, args.n)
        x = np.zeros(args.n)
        rep = monte_carlo_error(W, A, x, args.epsilon, args.trials, args.seed, args.threads)
        tol = args.tolerance or 0.02
        ok, stat = rep.max_rel_err < tol, rep.max_rel_err
        cols = "query_index,empirical_mse,predicted_mse,rel_err"
        rows = [(i, e, p, r) for i, (e, p, r) in enumerate(zip(rep.empirical_mse, rep.predicted_mse, rep.rel_err))]
    elif args.check == "lsq":
        from .mechanism import estimate_counts

        A = build_strategy(args.strategy, args.n)
        y = np.random.default_rng(args.seed).standard_normal(A.shape[0])
        ref, est = least_squares_oracle(A, y), estimate_counts(A, y)
        stat = float(np.abs(ref - est).max())
        tol = args.tolerance or 1e-8
        ok = stat <= tol
        cols = "index,oracle,estimate"
        rows = [(i, a, b) for i, (a, b) in enumerate(zip(ref, est))]
    elif args.check == "haar":
        rep = haar_equivalence_check(args.n, args.epsilon, args.trials, args.seed, args.threads)
        tol = args.tolerance or 0.03
        ok = rep.max_rel_err < tol and haar_structural_identity(args.n)
        stat = rep.max_rel_err
        cols = "index,haar_var,matrix_var,predicted"
        rows = [(i, a, b, c) for i, (a, b, c) in enumerate(zip(rep.empirical_mse, rep.extra["matrix"], rep.predicted_mse))]
    else:
        kind = args.strategy if args.strategy in ("hier", "wavelet", "identity") else "hier"
        table = growth_table(kind, args.n_list, args.epsilon)
        ratios = [r.max_ratio for r in table]
        stat = max(ratios) / min(ratios)
        tol = args.tolerance or 2.0
        ok = stat < tol
        cols = "n,max_error,total_error,max_ratio,total_ratio"
        rows = [(r.n, r.max_error, r.total_error, r.max_ratio, r.total_ratio) for r in table]
    verdict = [f"{'PASS' if ok else 'FAIL'} check={args.check} statistic={_fmt(stat)} tolerance={_fmt(tol)}"]
    _write(args, _csv(args, cols, rows, verdict))
    return 0 if ok else 1


def cmd_bench(args):
    rows = []
    for n in args.n_list:
        W = None if args.workload == "ranges" else _workload(args.workload, n)
        for name in args.strategies.split(","):
            A = Strategy(build_strategy(name, n), name)
            if W is None:
                errs = range_query_errors(A, args.epsilon)
                total, mx = float(errs.sum()), float(errs.max())
            else:
                rep = total_error(A, W, args.epsilon)
                total, mx = rep.total, rep.max
            rows.append((n, name, args.workload, total, mx))
    _write(args, _csv(args, "n,strategy,workload,total_error,max_error", rows))


COMMANDS = {
    "workload": cmd_workload,
    "strategy": cmd_strategy,
    "analyze": cmd_analyze,
    "optimize": cmd_optimize,
    "answer": cmd_answer,
    "verify": cmd_verify,
    "bench": cmd_bench,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args) or 0
    except (MatMechError, ValueError, OSError) as exc:
        print(f"matmech {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
