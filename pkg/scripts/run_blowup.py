"""Operator-norm growth along the lattice counterexample.

    python scripts/run_blowup.py [--nmax 256] [--seed 0]

Prints one row per N with the Schur-witness ratio, the Lipschitz ratio
``||f(A1,B) - f(A2,B)|| / ||A1 - A2||`` and the sup-norm certificate.
"""
import argparse

import numpy as np

from ncfuncalc import bench


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--nmax", type=int, default=256)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=2)
    args = p.parse_args()
    report = bench.run_opnorm_blowup(bench.doubling_sizes(args.nmax), restarts=args.restarts, seed=args.seed)
    print(f"{'N':>5} {'witness':>9} {'lipschitz':>10} {'0.15 lnN':>9} {'sup<=':>8}")
    for r in report.rows:
        print(f"{r.N:5d} {r.witness_ratio:9.4f} {r.lipschitz_ratio:10.4f} {0.15 * np.log(r.N):9.4f} {r.sup_norm:8.4f}")
    print(f"monotone={report.monotone} growth_held={report.growth_held}")


if __name__ == "__main__":
    main()
