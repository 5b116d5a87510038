"""
Command-line entry point.

Usage:
    dynamic-solow simulate --config run.txt --out runs/base
    dynamic-solow equilibria --config run.txt
    dynamic-solow sweep --grid gamma=350,1000 --grid c2=1e-4,7e-4 --out runs/scan
    dynamic-solow reproduce equilibria_base --out runs/repro

Every command returns one of the EXIT_* codes from ``policies``.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path
from typing import Any

from .analysis import cycle_durations, detrend, duration_histogram, growth_rate, mean_sentiment, regime_fraction
from .artifacts import (
    RunManifest,
    format_report,
    load_trajectory_csv,
    trajectory_csv,
    write_atomic,
    write_histogram_csv,
    write_manifest,
    write_report,
    write_run,
)
from .config import RuntimeConfig
from .dynamics import ReducedState
from .equilibria import condition_forms_disagree, equilibria
from .exceptions import (
    AnalysisError,
    ConfigError,
    DynamicSolowError,
    NumericalError,
    ParameterError,
    UnknownScenario,
)
from .integrator import phase_portrait, simulate
from .orchestrator import parse_grid
from .params import PARAM_KEYS, SimConfig, config_overrides, load_config
from .policies import (
    EXIT_CHECK_FAILED,
    EXIT_CONFIG,
    EXIT_IO,
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_UNKNOWN_SCENARIO,
    PORTRAIT_H,
    PORTRAIT_S,
    PORTRAIT_T_END,
    PORTRAIT_Z,
)
from .registry import get_scenario, scenario_names
from .sweeps import run_ensemble_sweep, run_scan_sweep

logger = logging.getLogger(__name__)

MODES = {"general": "general", "forced_supply": "forced_supply", "forced_demand": "forced_demand",
         "reduced": "reduced_deterministic"}


def _read_config(path: str | None) -> tuple[str, Any, SimConfig]:
    text = Path(path).read_text(encoding="utf-8") if path else ""
    p, cfg = load_config(text)
    return text, p, cfg


def _apply_flags(cfg: SimConfig, args: argparse.Namespace, overrides: dict[str, str]) -> SimConfig:
    update: dict[str, Any] = {}
    if getattr(args, "seed", None) is not None:
        update["seed"] = args.seed
        overrides["seed"] = str(args.seed)
    if getattr(args, "mode", None) is not None:
        update["regime_mode"] = MODES[args.mode]
        overrides["regime_mode"] = MODES[args.mode]
    if not update:
        return cfg
    return SimConfig(**{**cfg.model_dump(), **update})


def cmd_simulate(args: argparse.Namespace, runtime: RuntimeConfig) -> int:
    text, p, cfg = _read_config(args.config)
    overrides = config_overrides(text)
    cfg = _apply_flags(cfg, args, overrides)
    started = time.perf_counter()
    traj = simulate(p, cfg, runtime)
    out = Path(args.out)
    write_run(out, traj, time.perf_counter() - started, overrides)
    print(f"wrote {len(traj)} samples to {out}")
    return EXIT_OK


def cmd_equilibria(args: argparse.Namespace, runtime: RuntimeConfig) -> int:
    _, p, _ = _read_config(args.config)
    points = equilibria(p)
    print(f"{'s':>12} {'h':>12} {'z':>12}  {'kind':<7} {'stability':<9} eigenvalues (per day)")
    for pt in points:
        eig = ", ".join(f"{e.real:.4e}{e.imag:+.4e}j" for e in pt.eigenvalues)
        print(f"{pt.s:12.6f} {pt.h:12.6f} {pt.z:12.6f}  {pt.kind:<7} {pt.stability:<9} {eig}")
    if condition_forms_disagree(p):
        print("warning: printed and derived equilibrium conditions give different root counts", file=sys.stderr)
    return EXIT_OK


def _portrait_grid() -> list[ReducedState]:
    return [ReducedState(s, h, z) for s in PORTRAIT_S for h in PORTRAIT_H for z in PORTRAIT_Z]


def cmd_portrait(args: argparse.Namespace, runtime: RuntimeConfig) -> int:
    _, p, _ = _read_config(args.config)
    out = Path(args.out)
    results = phase_portrait(p, _portrait_grid(), t_end=args.t_end, runtime=runtime)
    lines = ["index,s0,h0,z0,label"]
    for i, r in enumerate(results):
        write_atomic(out / f"portrait_{i:02d}.csv", trajectory_csv(r.trajectory))
        lines.append(f"{i},{r.start.s!r},{r.start.h!r},{r.start.z!r},{r.label}")
        print(f"{i:2d} ({r.start.s:+.2f}, {r.start.h:+.2f}, {r.start.z:+.2f}) -> {r.label}")
    write_atomic(out / "labels.csv", "\n".join(lines) + "\n")
    cfg = results[0].trajectory.config if results else SimConfig(t_end=args.t_end, regime_mode="reduced_deterministic")
    write_manifest(out, RunManifest.for_run(
        p, cfg, outputs=[f"portrait_{i:02d}.csv" for i in range(len(results))] + ["labels.csv"], xi_on=False))
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace, runtime: RuntimeConfig) -> int:
    text, p, cfg = _read_config(args.config)
    cfg = _apply_flags(cfg, args, config_overrides(text))
    specs = list(args.grid or [])
    if args.replicates:
        specs.append("replicate=" + ",".join(str(i) for i in range(args.replicates)))
    grid = parse_grid(specs)
    for point in grid:
        for key in point:
            if key not in PARAM_KEYS and key not in ("seed", "replicate"):
                raise ConfigError(f"Unknown grid axis '{key}'", key=key)

    out = Path(args.out)
    if args.kind == "scan":
        records = run_scan_sweep(p, grid, out, runtime.parallelism)
        failed = sum(r.error is not None for r in records)
        print(f"scan: {len(records)} point(s), {failed} with errors")
    else:
        rows = run_ensemble_sweep(p, cfg, grid, out, runtime)
        failed = sum("error" in r for r in rows)
        print(f"ensemble: {len(rows)} run(s), {failed} with errors")
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace, runtime: RuntimeConfig) -> int:
    traj = load_trajectory_csv(args.trajectory)
    out = Path(args.out) if args.out else Path(args.trajectory).parent
    burn_in = args.burn_in if args.burn_in is not None else 0.5 * traj.t[-1]
    report: dict[str, Any] = {"mode": traj.mode, "samples": len(traj), "window_start": burn_in}

    if traj.reduced:
        series = traj["s"]
    else:
        for v in ("y", "k_s", "k_d"):
            report[f"slope_{v}"] = growth_rate(traj.t, traj[v], (burn_in, traj.t[-1]), v).slope
        series = detrend(traj.t, traj["y"])
        if traj.mode == "general":
            report["regime_fraction"] = regime_fraction(traj)
    report["mean_s"] = mean_sentiment(traj, burn_in)
    try:
        hist = duration_histogram(cycle_durations(traj.t, series))
        report["cycles"] = hist.total
        report["modal_bin_years"] = hist.modal_bin
        report["band_fraction"] = hist.band_fraction
        write_histogram_csv(out / "durations.csv", hist)
    except AnalysisError as e:
        report["cycles"] = f"unavailable ({e})"

    write_report(out / "analysis.txt", report)
    print(format_report(report), end="")
    return EXIT_OK


def cmd_reproduce(args: argparse.Namespace, runtime: RuntimeConfig) -> int:
    scenario = get_scenario(args.scenario)
    out = Path(args.out) / scenario.name
    started = time.perf_counter()
    result = scenario.run(out, runtime)
    result = result.model_copy(update={"wall_clock_seconds": time.perf_counter() - started})
    write_atomic(out / "result.json", result.model_dump_json(indent=2) + "\n")
    for c in result.checks:
        print(c.line())
    print(f"{scenario.name}: {'PASS' if result.passed else 'FAIL'} ({result.wall_clock_seconds:.1f} s)")
    return EXIT_OK if result.passed else EXIT_CHECK_FAILED


COMMANDS = {
    "simulate": cmd_simulate,
    "equilibria": cmd_equilibria,
    "portrait": cmd_portrait,
    "sweep": cmd_sweep,
    "analyze": cmd_analyze,
    "reproduce": cmd_reproduce,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dynamic-solow")
    parser.add_argument("--log-level", help="Logging level (default from DSOLOW_LOG_LEVEL or INFO)")
    sub = parser.add_subparsers(dest="cmd", required=True)

    sim_p = sub.add_parser("simulate", help="Simulate one run and write trajectory + manifest")
    eq_p = sub.add_parser("equilibria", help="Print the equilibrium table of the reduced system")
    por_p = sub.add_parser("portrait", help="Deterministic phase-portrait trajectories with attractor labels")
    sw_p = sub.add_parser("sweep", help="Bifurcation scan or simulation ensemble over a parameter grid")
    an_p = sub.add_parser("analyze", help="Growth, sentiment and cycle statistics of an exported trajectory")
    rep_p = sub.add_parser("reproduce", help="Run a reproduction scenario and report PASS/FAIL per check")

    for p in (sim_p, eq_p, por_p, sw_p):
        p.add_argument("--config", help="Path to a key = value config document (default: base case)")
    for p in (sim_p, por_p, sw_p, an_p, rep_p):
        p.add_argument("--out", default=None, help="Output directory")
    for p in (sim_p, sw_p):
        p.add_argument("--seed", type=int, help="Seed (master seed for sweeps)")
        p.add_argument("--mode", choices=sorted(MODES), help="Regime mode")
    for p in (sw_p, rep_p):
        p.add_argument("--parallel", type=int, dest="parallelism", help="Concurrent workers")

    por_p.add_argument("--t-end", type=float, default=PORTRAIT_T_END, help="Horizon per trajectory, days")
    sw_p.add_argument("--grid", action="append", help="Grid axis 'name=v1,v2,...' (repeatable)")
    sw_p.add_argument("--kind", choices=("scan", "ensemble"), default="scan")
    sw_p.add_argument("--replicates", type=int, default=0, help="Add a replicate axis with this many seeds")
    an_p.add_argument("--trajectory", required=True, help="Path to a trajectory.csv with its manifest alongside")
    an_p.add_argument("--burn-in", type=float, help="Analysis window start, days (default: half the run)")
    rep_p.add_argument("scenario", help="Scenario name")
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    args = build_parser().parse_args(argv)

    runtime = RuntimeConfig()
    if getattr(args, "parallelism", None) is not None:
        runtime.parallelism = max(1, args.parallelism)
    if args.log_level:
        runtime.log_level = args.log_level.upper()
    logging.basicConfig(level=runtime.log_level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    if args.cmd != "analyze" and getattr(args, "out", "unset") is None:
        args.out = runtime.output_dir

    try:
        return COMMANDS[args.cmd](args, runtime)
    except UnknownScenario as e:
        print(f"error: {e}", file=sys.stderr)
        print("valid scenarios: " + ", ".join(scenario_names()), file=sys.stderr)
        return EXIT_UNKNOWN_SCENARIO
    except (ParameterError, ConfigError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, AnalysisError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_IO
    except DynamicSolowError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
