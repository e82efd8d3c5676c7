"""Command-line entry point.

    paritylab simulate --config cfg.json --out run/
    paritylab solve --records run/records.ndjson --calibrations run/calibrations.json --solver q_analog
    paritylab curve --config cfg.json --out run/
    paritylab sweep --config sweep.json --out run/ --threads 4
    paritylab bounds --n 3 --eta-a 0.05 --eta-d 0.3 --sigma 0.304 --delta 0.01
    paritylab repro fig3 --seed 7 --out repro/

Exit status is 0 on success and 2 when the configuration is invalid.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict, replace
from pathlib import Path

from .bounds import BoundParams, no_postselect_bound, postselected_bound, typicality_probability
from .harness.campaign import generate_pools, run_campaign
from .harness.config import REPRO, ConfigError, ExperimentConfig
from .harness.outputs import emit_outputs
from .readout import CalibrationSet, ReadoutParams
from .solvers import SOLVERS, QueryBatch, run_solver
from .rng import stream

EXIT_CONFIG = 2


def _load_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.from_json(args.config) if args.config else ExperimentConfig()
    if args.seed is not None:
        cfg = replace(cfg, master_seed=args.seed)
    return cfg.validate()


def _summary_line(result) -> str:
    lines = []
    for r in result.summary:
        if r.key != "avg":
            continue
        where = "" if r.sweep_param == "none" else f"{r.sweep_param}={r.value} "
        iv = r.interval
        lines.append(f"{where}{r.solver:>14s}  N1%: [{iv.lo:9.1f}, {iv.hi:9.1f}]"
                     + ("  (censored)" if iv.censored else ""))
    return "\n".join(lines)


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    result = generate_pools(cfg, args.threads)
    manifest = emit_outputs(result, args.out)
    print(f"wrote {len(result.pools)} pools; manifest {manifest}")
    return 0


def cmd_curve(args, require_sweep: bool) -> int:
    cfg = _load_config(args)
    if require_sweep and cfg.sweep is None:
        raise ConfigError("sweep needs a 'sweep' entry in the config")
    if not require_sweep and cfg.sweep is not None:
        raise ConfigError("curve evaluates a single noise point; use 'sweep' for sweeps")
    result = run_campaign(cfg, args.threads)
    manifest = emit_outputs(result, args.out)
    print(_summary_line(result))
    print(f"manifest {manifest}")
    return 0


def cmd_solve(args) -> int:
    with open(args.calibrations) as fh:
        cals = json.load(fh)
    records: dict[str, list] = {}
    truth: dict[str, str] = {}
    with open(args.records) as fh:
        for line in fh:
            rec = json.loads(line)
            records.setdefault(rec["pool"], []).append(rec)
            truth[rec["pool"]] = rec["key"]
    pool_id = args.pool
    if pool_id is None:
        if len(records) != 1:
            raise ConfigError(f"records hold {len(records)} pools; pick one with --pool")
        pool_id = next(iter(records))
    if pool_id not in records or pool_id not in cals:
        raise ConfigError(f"unknown pool {pool_id!r}")
    recs = records[pool_id][: args.N] if args.N else records[pool_id]
    cal = CalibrationSet(tuple(ReadoutParams(*p) for p in cals[pool_id]["params"]),
                         cals[pool_id]["shots_per_point"])
    batch = QueryBatch([r["v_a"] for r in recs], [r["v_d"] for r in recs], cal)
    eta_a = cals[pool_id]["eta_a"] if args.eta_a is None else args.eta_a
    seed = 0 if args.seed is None else args.seed
    est = run_solver(args.solver, batch, eta_a, stream(seed, "solve", args.solver))
    print(json.dumps({"pool": pool_id, "solver": args.solver, "N": len(batch),
                      "key": str(est.key), "true_key": truth[pool_id], "score": est.score,
                      "tie_broken": est.tie_broken}))
    return 0


def cmd_bounds(args) -> int:
    fields = {}
    if args.config:
        with open(args.config) as fh:
            fields.update(json.load(fh))
    for name in ("n", "eta_a", "eta_d", "sigma", "delta", "delta_prime", "delta_dprime"):
        value = getattr(args, name)
        if value is not None:
            fields[name] = value
    try:
        p = BoundParams(**fields)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    n_post = postselected_bound(p)
    typ, clamped = typicality_probability(p.eta_bar_a, max(1, int(n_post / 2)), p.delta_prime)
    print(json.dumps({
        "params": asdict(p),
        "postselected_bound": n_post,
        "no_postselect_bound": no_postselect_bound(p),
        "typicality_probability_at_half_bound": typ,
        "typicality_clamped": clamped,
    }, indent=2))
    return 0


def cmd_repro(args) -> int:
    seed = 0 if args.seed is None else args.seed
    configs = REPRO[args.figure](seed)
    out = Path(args.out)
    for name, cfg in configs.items():
        overrides = {}
        if args.trials is not None:
            overrides["resample_trials"] = args.trials
        if args.no_records:
            overrides["write_records"] = False
        cfg = replace(cfg, **overrides).validate()
        result = run_campaign(cfg, args.threads)
        emit_outputs(result, out / name)
        print(f"[{name}]")
        print(_summary_line(result))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment config (JSON)")
    common.add_argument("--seed", type=int, help="master seed (overrides the config)")
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--threads", type=int, default=1, help="worker threads")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="paritylab", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("simulate", parents=[common], help="generate calibrated query pools")
    sub.add_parser("curve", parents=[common], help="error curves at one noise point")
    sub.add_parser("sweep", parents=[common], help="error curves over a noise sweep")

    p = sub.add_parser("solve", parents=[common], help="run one solver on stored records")
    p.add_argument("--records", required=True)
    p.add_argument("--calibrations", required=True)
    p.add_argument("--pool", help="pool id (required when the file holds several)")
    p.add_argument("--solver", required=True, choices=sorted(SOLVERS))
    p.add_argument("--N", type=int, help="use only the first N records")
    p.add_argument("--eta-a", type=float, help="ancilla error for q_analog thresholds")

    p = sub.add_parser("bounds", parents=[common], help="analog-solver query bounds")
    p.add_argument("--n", type=int)
    p.add_argument("--eta-a", type=float)
    p.add_argument("--eta-d", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--delta-prime", type=float)
    p.add_argument("--delta-dprime", type=float)

    p = sub.add_parser("repro", parents=[common], help="canned figure reproductions")
    p.add_argument("figure", choices=sorted(REPRO))
    p.add_argument("--trials", type=int, help="override resample trials")
    p.add_argument("--no-records", action="store_true", help="skip the raw NDJSON records")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handlers = {
        "simulate": cmd_simulate,
        "curve": lambda a: cmd_curve(a, require_sweep=False),
        "sweep": lambda a: cmd_curve(a, require_sweep=True),
        "solve": cmd_solve,
        "bounds": cmd_bounds,
        "repro": cmd_repro,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
