"""Sensitivity of profile-equivalent factorizations of H_n and Y_n."""
import argparse

from matmech.linalg import l1_sensitivity
from matmech.optimize import eigen_factor, min_sensitivity, triangular_factor
from matmech.strategies import decomposed_sensitivity, hierarchical_strategy, wavelet_strategy


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-list", default="4,8,16")
    args = ap.parse_args()
    print("kind,n,original,closed_form,eigen_factor,triangular,min_sensitivity")
    for n in (int(v) for v in args.n_list.split(",")):
        for kind, build in (("hier", hierarchical_strategy), ("wavelet", wavelet_strategy)):
            A = build(n)
            row = [
                l1_sensitivity(A),
                decomposed_sensitivity(kind, n),
                l1_sensitivity(eigen_factor(A)),
                l1_sensitivity(triangular_factor(A)),
                min_sensitivity(A).sensitivity,
            ]
            print(f"{kind},{n}," + ",".join(f"{v:.4f}" for v in row))


if __name__ == "__main__":
    main()
