#!/usr/bin/env python3
"""Run the deterministic CF-oracle sweep for the harmonic-coefficient process
with exact symmetric stable innovations and print the convergence table.

Usage:
    python scripts/run_oracle_sweep.py [--alpha 1.5] [--n-max 1000000]
"""

import argparse

from stablesum.cf_oracle import cf_convergence_sweep, limit_log_cf
from stablesum.linear_process import FddSpec
from stablesum.slowly_varying import constant
from stablesum.stable_law import SkewedStableParams


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--alpha", type=float, default=1.5)
    parser.add_argument("--n-max", type=int, default=10**6)
    args = parser.parse_args()

    params = SkewedStableParams(args.alpha, 1.0, 0.0)
    fdd = FddSpec((0.5, 1.0), (1.0, -0.5))
    n_list = [n for n in (10**2, 10**3, 10**4, 10**5, 10**6) if n <= args.n_max]

    print(f"limit log-CF: {limit_log_cf(params, fdd):.6f}")
    print(f"{'N':>9}  {'distance':>10}  {'past':>10}  {'wall_ms':>8}")
    rows = cf_convergence_sweep(constant(1.0), params, fdd, n_list)
    for r in rows:
        print(f"{r.n:>9}  {r.distance:>10.6f}  {r.past_part:>10.6f}  {r.wall_ms:>8.1f}")
    if len(rows) > 1:
        print(f"ratio last/first: {rows[-1].distance / rows[0].distance:.4f}")


if __name__ == "__main__":
    main()
