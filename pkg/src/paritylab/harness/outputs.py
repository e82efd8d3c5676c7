"""Plot-ready campaign outputs and the rerun manifest.

Files written into the output directory:

``records.ndjson``
    one JSON object per simulated query.
``calibrations.json``
    per-pool readout estimates, needed to re-solve the raw records.
``curves.csv`` (or ``curves_<param>_<value>.csv`` per sweep point)
    error curves with credible and antitonic-regressed bounds.
``summary.csv``
    N at the target error per (noise point, solver, key) plus key averages.
``manifest.json``
    config, its hash, the seed and sha256 of every file above.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

from .. import __version__
from .campaign import CampaignResult, seed_lineage

CURVE_COLUMNS = ("solver", "key", "N", "p_hat", "lo", "hi", "lo_mono", "hi_mono")
SUMMARY_COLUMNS = ("sweep_param", "value", "solver", "key", "N1pct_lo", "N1pct_hi", "censored")


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "1" if x else "0"
    return repr(float(x)) if isinstance(x, float) else str(x)


def curve_filename(param: str, value) -> str:
    return "curves.csv" if param == "none" else f"curves_{param}_{_fmt(value)}.csv"


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_records(result: CampaignResult, path: Path) -> int:
    seed = result.config.master_seed
    points = result.config.noise_points()
    count = 0
    with open(path, "w") as fh:
        for pool in result.pools.values():
            param, value, _ = points[pool.point]
            head = {"pool": pool.id, "key": str(pool.key), "mode": pool.mode.value,
                    "noise_point": {"index": pool.point, "param": param, "value": value}}
            for i, (va, vd) in enumerate(zip(pool.batch.v_a.tolist(), pool.batch.v_d.tolist())):
                rec = dict(head, index=i, v_a=va, v_d=vd, seed=seed_lineage(seed, pool, i))
                fh.write(json.dumps(rec, separators=(",", ":")) + "\n")
                count += 1
    return count


def write_calibrations(result: CampaignResult, path: Path):
    out = {}
    for pool in result.pools.values():
        cal = pool.batch.calibration
        out[pool.id] = {
            "shots_per_point": cal.shots_per_point,
            "eta_a": pool.noise.eta_a,
            "params": [[p.mu0, p.mu1, p.sigma0, p.sigma1] for p in cal.params],
        }
    with open(path, "w") as fh:
        json.dump(out, fh, indent=1, sort_keys=True)


def write_curves(result: CampaignResult, out: Path) -> list[Path]:
    written = []
    keys = [str(k) for k in result.config.key_list]
    for p, (param, value, _) in enumerate(result.config.noise_points()):
        path = out / curve_filename(param, value)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CURVE_COLUMNS)
            for solver in result.config.solvers:
                for key in keys:
                    for pt in result.curves[(p, solver, key)].points:
                        w.writerow([solver, key, pt.N] + [_fmt(v) for v in
                                   (pt.p_hat, pt.lo, pt.hi, pt.lo_mono, pt.hi_mono)])
        written.append(path)
    return written


def write_summary(result: CampaignResult, path: Path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        for r in result.summary:
            w.writerow([r.sweep_param, _fmt(r.value), r.solver, r.key,
                        _fmt(r.interval.lo), _fmt(r.interval.hi), _fmt(r.interval.censored)])


def emit_outputs(result: CampaignResult, out_dir) -> Path:
    """Write every output file and return the manifest path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    if result.config.write_records:
        write_records(result, out / "records.ndjson")
        files.append(out / "records.ndjson")
    write_calibrations(result, out / "calibrations.json")
    files.append(out / "calibrations.json")
    if result.curves:
        files += write_curves(result, out)
        write_summary(result, out / "summary.csv")
        files.append(out / "summary.csv")

    manifest = {
        "package_version": __version__,
        "seed": result.config.master_seed,
        "config": result.config.to_dict(),
        "config_sha256": result.config.sha256(),
        "schema": {"curves": list(CURVE_COLUMNS), "summary": list(SUMMARY_COLUMNS)},
        "files": {f.name: _sha256(f) for f in files},
    }
    path = out / "manifest.json"
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def load_manifest(path) -> dict:
    with open(path) as fh:
        return json.load(fh)
