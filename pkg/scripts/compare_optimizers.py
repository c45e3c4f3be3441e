"""Total error at eps = 1 of every strategy-selection method on all range queries."""
import argparse
import warnings

import numpy as np

from matmech.analysis import total_error
from matmech.errors import NonConvergenceWarning
from matmech.optimize import (
    OptimizerOptions,
    l2_optimal_profile,
    min_error_descent,
    min_sensitivity,
    svb_optimal_strategy,
)
from matmech.strategies import hierarchical_strategy, wavelet_strategy
from matmech.workloads import all_range_queries


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-list", default="4,8,16,32")
    ap.add_argument("--iters", type=int, default=2000)
    ap.add_argument("--restarts", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    opts = OptimizerOptions(max_iters=args.iters, restarts=args.restarts, seed=args.seed)
    warnings.simplefilter("ignore", NonConvergenceWarning)
    print("n,identity,hier,wavelet,hier_minsens,svb,l2,descent")
    for n in (int(v) for v in args.n_list.split(",")):
        W = all_range_queries(n)
        H = hierarchical_strategy(n)
        candidates = [
            np.eye(n),
            H,
            wavelet_strategy(n),
            min_sensitivity(H, opts),
            svb_optimal_strategy(W, opts).strategy,
            l2_optimal_profile(W, opts).strategy,
            min_error_descent(W, opts).strategy,
        ]
        print(f"{n}," + ",".join(f"{total_error(A, W, 1.0).total:.2f}" for A in candidates))


if __name__ == "__main__":
    main()
