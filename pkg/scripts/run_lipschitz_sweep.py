"""Trace-norm Lipschitz ratios over a sweep of perturbation sizes.

    python scripts/run_lipschitz_sweep.py [--trials 200] [--n 16] [--degree 8] [--seed 0]
"""
import argparse

from ncfuncalc import bench


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--degree", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    sweep = bench.run_lipschitz_sweep(args.trials, args.n, args.degree, seed=args.seed)
    print(f"{'eps':>8} {'max ratio':>10} {'max split residual':>19}")
    for eps, rep in sweep.items():
        print(f"{eps:8.0e} {rep.max_ratio:10.5f} {rep.max_split_residual:19.2e}")
    maxima = [rep.max_ratio for rep in sweep.values()]
    print(f"spread x{max(maxima) / min(maxima):.4f}")


if __name__ == "__main__":
    main()
