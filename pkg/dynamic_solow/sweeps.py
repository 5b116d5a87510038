"""
Grid sweeps driven by the CLI: bifurcation scans and simulation ensembles.

Each grid point gets its own seed from (master seed, grid index), so the
files a sweep writes do not depend on how many workers ran it.
"""

from __future__ import annotations

import logging
import time
from pathlib import Path
from typing import Any, Mapping, Sequence

from .analysis import growth_rate, mean_sentiment, regime_fraction
from .artifacts import fmt_float, write_atomic, write_report, write_run, write_scan_csv
from .config import RuntimeConfig
from .equilibria import BifurcationRecord, scan_grid
from .exceptions import DynamicSolowError
from .integrator import simulate
from .orchestrator import INTEGER_AXES, derive_seed, run_parallel
from .params import SimConfig, ValidatedParams
from .policies import CYCLE_T_END

logger = logging.getLogger(__name__)

SCAN_FILE = "scan.csv"
ENSEMBLE_FILE = "ensemble.csv"
ENSEMBLE_HEADER = "index,seed,overrides,y0,ks0,kd0,mean_s,regime_fraction,error"


def run_scan_sweep(
    p: ValidatedParams,
    grid: Sequence[Mapping[str, float]],
    out_dir: str | Path,
    parallelism: int,
    t_end: float = CYCLE_T_END,
) -> list[BifurcationRecord]:
    records = scan_grid(p, [dict(point) for point in grid], parallelism, t_end)
    if records:
        write_scan_csv(Path(out_dir) / SCAN_FILE, records)
    return records


def _param_overrides(point: Mapping[str, Any]) -> dict[str, float]:
    return {k: v for k, v in point.items() if k not in INTEGER_AXES}


def _run_point(
    p: ValidatedParams, cfg: SimConfig, index: int, point: Mapping[str, Any], master_seed: int,
    out_dir: Path, runtime: RuntimeConfig,
) -> dict[str, Any]:
    seed = int(point["seed"]) if "seed" in point else derive_seed(master_seed, index)
    row: dict[str, Any] = {"index": index, "seed": seed, "overrides": dict(point)}
    try:
        q = p.with_overrides(**_param_overrides(point))
        run_cfg = cfg.model_copy(update={"seed": seed})
        started = time.perf_counter()
        traj = simulate(q, run_cfg, runtime)
        run_dir = out_dir / f"run_{index:04d}"
        write_run(run_dir, traj, time.perf_counter() - started,
                  overrides={k: repr(v) for k, v in point.items()})

        summary: dict[str, Any] = {"seed": seed}
        for name, key in (("y", "y0"), ("k_s", "ks0"), ("k_d", "kd0")):
            summary[key] = growth_rate(traj.t, traj[name], variable=name).slope
        summary["mean_s"] = mean_sentiment(traj, 0.5 * run_cfg.t_end)
        if not traj.reduced and traj.mode == "general":
            summary["regime_fraction"] = regime_fraction(traj)
        write_report(run_dir / "summary.txt", summary)
        row.update(summary)
    except DynamicSolowError as e:
        logger.warning(f"ensemble point {index} failed: {e}")
        row["error"] = f"{type(e).__name__}: {e}"
    return row


def run_ensemble_sweep(
    p: ValidatedParams,
    cfg: SimConfig,
    grid: Sequence[Mapping[str, Any]],
    out_dir: str | Path,
    runtime: RuntimeConfig,
) -> list[dict[str, Any]]:
    """Simulate every grid point, one run directory each, plus an ``ensemble.csv`` index."""
    out_dir = Path(out_dir)
    logger.info(f"ensemble sweep over {len(grid)} point(s), parallelism={runtime.parallelism}")
    rows = run_parallel(
        lambda item: _run_point(p, cfg, item[0], item[1], cfg.seed, out_dir, runtime),
        list(enumerate(grid)),
        runtime.parallelism,
    )
    rows = [
        r if isinstance(r, dict) else {"index": i, "seed": "", "overrides": dict(grid[i]), "error": repr(r)}
        for i, r in enumerate(rows)
    ]

    def cell(row: dict[str, Any], key: str) -> str:
        v = row.get(key, "")
        if isinstance(v, float):
            return fmt_float(v)
        if isinstance(v, dict):
            return ";".join(f"{k}={v[k]}" for k in v)
        return str(v).replace(",", ";")

    lines = [ENSEMBLE_HEADER] + [",".join(cell(r, k) for k in ENSEMBLE_HEADER.split(",")) for r in rows]
    if rows:
        write_atomic(out_dir / ENSEMBLE_FILE, "\n".join(lines) + "\n")
    return rows
