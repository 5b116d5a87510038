from __future__ import annotations

from pathlib import Path

import numpy as np

from ...analysis import crossing_sampled_slope, cycle_durations, growth_rate
from ...artifacts import write_report, write_run
from ...config import RuntimeConfig
from ...equilibria import detect_limit_cycle, probe_states
from ...exceptions import InsufficientCrossings
from ...integrator import simulate
from ...params import ModelParams, derived_quantities, validate
from ..base import ScenarioResult, check
from ..runs import balanced_config

CYCLE_CASE = {"gamma": 1000.0, "c2": 2e-5}


class LimitCycleStagnationScenario:
    name = "limit_cycle_stagnation"
    description = "Forced demand on a limit cycle (gamma=1000, c2=2e-5): demand stagnates, output grows near eps"

    @staticmethod
    def run(out_dir: Path, runtime: RuntimeConfig) -> ScenarioResult:
        p = validate(ModelParams()).with_overrides(**CYCLE_CASE)
        R = derived_quantities(p).R
        checks = []
        report: dict[str, float] = {"R": R, "epsilon": p.epsilon}

        for label, q in (("periodic", p.with_overrides(sigma_xi=0.0)), ("stochastic", p)):
            cfg = balanced_config(q, "forced_demand", 500, s0=0.1)
            traj = simulate(q, cfg, runtime)
            window = (0.5 * cfg.t_end, cfg.t_end)
            tail = traj.t >= window[0]
            # k_d swings by c1*s every cycle; one sample per sentiment cycle keeps only the drift
            kd0 = crossing_sampled_slope(traj.t[tail], traj["k_d"][tail], traj["s"][tail])
            y0 = growth_rate(traj.t, traj["y"], window, "y").slope
            report[f"{label}_kd0"] = kd0
            report[f"{label}_kd0_ols"] = growth_rate(traj.t, traj["k_d"], window, "k_d").slope
            report[f"{label}_y0"] = y0
            write_run(out_dir / label, traj)
            checks.append(check(f"{label} k_d stagnation", abs(kd0) < 0.1 * R, kd0, f"|slope| < {0.1 * R:.6g}"))
            checks.append(check(f"{label} y slope", 0.5 * q.epsilon <= y0 <= 1.5 * q.epsilon, y0,
                                f"in [{0.5 * q.epsilon:.6g}, {1.5 * q.epsilon:.6g}]"))
            if label == "periodic":
                try:
                    periodic_durations = cycle_durations(traj.t[tail], traj["s"][tail])
                except InsufficientCrossings:
                    periodic_durations = None

        cycle = None
        for probe in probe_states():
            cycle = detect_limit_cycle(p, probe, runtime=runtime)
            if cycle is not None:
                break
        checks.append(check("limit cycle detected", cycle is not None and cycle.spread < 0.01,
                            "none" if cycle is None else f"period {cycle.period:.6g} d, spread {cycle.spread:.3g}",
                            "cycle with interval spread < 0.01"))
        if cycle is not None and periodic_durations is not None:
            mismatch = float(abs(np.mean(periodic_durations) - cycle.period) / cycle.period)
            report["cycle_period_days"] = cycle.period
            report["cycle_amplitude"] = cycle.amplitude
            report["sentiment_duration_mismatch"] = mismatch
            checks.append(check("sentiment cycle durations", mismatch < 0.01, mismatch,
                                "mean duration within 1% of detected period"))

        write_report(out_dir / "report.txt", report)
        return ScenarioResult(scenario=LimitCycleStagnationScenario.name, checks=checks,
                              outputs=["periodic", "stochastic", "report.txt"])
