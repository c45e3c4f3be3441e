"""Max and total error over all range queries for I_n, H_n and Y_n, with growth-normalized ratios."""
import argparse

from matmech.oracle import growth_band, growth_table


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-list", default="16,32,64,128,256,512,1024")
    ap.add_argument("--epsilon", type=float, default=1.0)
    args = ap.parse_args()
    grid = [int(v) for v in args.n_list.split(",")]
    print("kind,n,max_error,total_error,max_ratio,total_ratio")
    for kind in ("identity", "hier", "wavelet"):
        rows = growth_table(kind, grid, args.epsilon)
        for r in rows:
            print(f"{kind},{r.n},{r.max_error:.6g},{r.total_error:.6g},{r.max_ratio:.4f},{r.total_ratio:.4f}")
        print(f"# {kind}: max_ratio spread {growth_band(rows):.3f}, total_ratio spread {growth_band(rows, 'total_ratio'):.3f}")


if __name__ == "__main__":
    main()
