#!/usr/bin/env python3
"""Analog vs digital solvers for n = 2 and 3, key-averaged error curves and N1%."""

import argparse
from collections import defaultdict
from dataclasses import replace
from pathlib import Path

import numpy as np

from paritylab.harness import emit_outputs, run_campaign
from paritylab.harness.config import fig3_configs


def averaged_curve(result, solver):
    p = defaultdict(list)
    for (point, s, _), curve in result.curves.items():
        if s == solver:
            for pt in curve.points:
                p[pt.N].append(pt.p_hat)
    return {N: float(np.mean(v)) for N, v in sorted(p.items())}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="out/fig3")
    ap.add_argument("--trials", type=int, default=None)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    for name, cfg in fig3_configs(args.seed).items():
        if args.trials:
            cfg = replace(cfg, resample_trials=args.trials)
        result = run_campaign(cfg, args.threads)
        emit_outputs(result, Path(args.out) / name)
        print(f"[{name}] key-averaged p_e")
        curves = {s: averaged_curve(result, s) for s in cfg.solvers}
        print("      N " + " ".join(f"{s:>13s}" for s in cfg.solvers))
        for N in curves[cfg.solvers[0]]:
            print(f"{N:7d} " + " ".join(f"{curves[s][N]:13.4f}" for s in cfg.solvers))
        for s in cfg.solvers:
            iv = result.average(s)
            print(f"  N1%({s}) in [{iv.lo:.0f}, {iv.hi:.0f}]")


if __name__ == "__main__":
    main()
