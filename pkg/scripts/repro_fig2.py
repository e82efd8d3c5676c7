#!/usr/bin/env python3
"""Digital solvers at n = 2: per-key N1% for disagreement minimization vs majority vote."""

import argparse
from dataclasses import replace

from paritylab.harness import emit_outputs, run_campaign
from paritylab.harness.config import fig2_config


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="out/fig2")
    ap.add_argument("--trials", type=int, default=None, help="resamples per N (default 2000)")
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    cfg = fig2_config(args.seed)
    if args.trials:
        cfg = replace(cfg, resample_trials=args.trials)
    result = run_campaign(cfg, args.threads)
    emit_outputs(result, args.out)

    print(f"{'key':>5s} {'C lo':>8s} {'C hi':>8s} {'Q lo':>8s} {'Q hi':>8s}")
    for key in [str(k) for k in cfg.key_list] + ["avg"]:
        c = result.rows("c_digital", key)[0].interval
        q = result.rows("q_digital", key)[0].interval
        mark = " (censored: too few resamples or too small a pool)" if c.censored or q.censored else ""
        print(f"{key:>5s} {c.lo:8.1f} {c.hi:8.1f} {q.lo:8.1f} {q.hi:8.1f}{mark}")
    print(f"outputs in {args.out}")


if __name__ == "__main__":
    main()
