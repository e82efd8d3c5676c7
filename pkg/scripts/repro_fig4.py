#!/usr/bin/env python3
"""n = 3 readout sweeps: ancilla error (a) and data error (b)."""

import argparse
from dataclasses import replace
from pathlib import Path

from paritylab.harness import emit_outputs, run_campaign
from paritylab.harness.config import fig4_configs


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="out/fig4")
    ap.add_argument("--only", choices=["fig4a", "fig4b"])
    ap.add_argument("--trials", type=int, default=None)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    for name, cfg in fig4_configs(args.seed).items():
        if args.only and name != args.only:
            continue
        if args.trials:
            cfg = replace(cfg, resample_trials=args.trials)
        result = run_campaign(cfg, args.threads)
        emit_outputs(result, Path(args.out) / name)
        print(f"[{name}] averaged N1% (point estimate, interval)")
        print(f"{cfg.sweep.param:>8s} " + " ".join(f"{s:>24s}" for s in cfg.solvers))
        for i, value in enumerate(cfg.sweep.values):
            cells = []
            for s in cfg.solvers:
                iv = result.average(s, i)
                cells.append(f"{iv.point:7.0f} [{iv.lo:6.0f},{iv.hi:6.0f}]{'*' if iv.censored else ' '}")
            print(f"{value:8.2f} " + " ".join(f"{c:>24s}" for c in cells))


if __name__ == "__main__":
    main()
