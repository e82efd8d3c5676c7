#!/usr/bin/env python3
"""Compare the postselected query bound with the simulated analog quantum solver.

The noise is matched to the solver's threshold model: the ancilla error comes
from readout alone and data bits are not flipped before readout.
"""

import argparse
import math

from paritylab.bounds import BoundParams, no_postselect_bound, postselected_bound
from paritylab.harness.campaign import generate_pool
from paritylab.oracle import NoiseModel, OracleMode, all_keys
from paritylab.readout import eta_from_sigma
from paritylab.rng import stream
from paritylab.solvers import solve_q_analog


def empirical_error(n, eta_a, sigma, N, reps, seed):
    noise = NoiseModel.uniform(n, eta_a=eta_a, eta_d=eta_from_sigma(sigma))
    per_key = max(1, reps // 2**n)
    fails = 0
    for key in all_keys(n):
        pool = generate_pool(key, OracleMode.QUANTUM, noise, N * per_key, seed, point=n)
        rng = stream(seed, "bound", n, key.to_int())
        for r in range(per_key):
            fails += solve_q_analog(pool.batch.subset(slice(r * N, (r + 1) * N)), eta_a, rng).key != key
    return fails / (per_key * 2**n)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sigma", type=float, default=0.304)
    ap.add_argument("--eta-a", type=float, nargs="+", default=[0.0, 0.05, 0.2, 0.35])
    ap.add_argument("--delta", type=float, nargs="+", default=[0.05, 0.01])
    ap.add_argument("--reps", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"{'n':>2s} {'eta_a':>6s} {'delta':>6s} {'N_post':>7s} {'N_nops':>7s} {'p_e':>7s}")
    for n in (2, 3):
        for eta_a in args.eta_a:
            for delta in args.delta:
                p = BoundParams(n, eta_a, 0.0, args.sigma, delta)
                N = math.ceil(postselected_bound(p))
                pe = empirical_error(n, eta_a, args.sigma, N, args.reps, args.seed)
                flag = "" if pe <= delta else "  > delta"
                print(f"{n:2d} {eta_a:6.2f} {delta:6.3f} {N:7d} {no_postselect_bound(p):7.1f} {pe:7.3f}{flag}")


if __name__ == "__main__":
    main()
