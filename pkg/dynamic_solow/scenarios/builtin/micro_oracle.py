from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from ...artifacts import write_report
from ...config import RuntimeConfig
from ...params import ModelParams
from ...policies import MICRO_AGENTS, MICRO_ALPHA, SCENARIO_SEED
from ...stochastic import MicroEnsemble, NoiseProcess, autocorrelation, mean_field_path, noise_streams, run_micro_ensemble
from ..base import ScenarioResult, check

FORCE = 0.3
OU_SAMPLES = 1_000_000


class MicroOracleScenario:
    name = "micro_oracle"
    description = "Agent ensemble against the mean-field sentiment equation, plus news-noise statistics"

    @staticmethod
    def run(out_dir: Path, runtime: RuntimeConfig) -> ScenarioResult:
        p = ModelParams()
        dt = 1.0
        steps = int(10 * p.tau_s / dt)
        forces = np.full(steps, FORCE)

        noise_rng, micro_rng = noise_streams(SCENARIO_SEED)
        ens = MicroEnsemble.with_sentiment(MICRO_AGENTS, p.tau_s, 0.0, micro_rng)
        s_micro = run_micro_ensemble(ens, forces, dt, micro_rng)
        s_field = mean_field_path(s_micro[0], forces, dt, p.tau_s)
        sup_dev = float(np.max(np.abs(s_micro - s_field)))

        target = math.tanh(MICRO_ALPHA * FORCE / 2)
        stationary = float(np.mean(s_micro[steps // 2:]))
        std_err = math.sqrt((1 - target**2) / MICRO_AGENTS)

        proc = NoiseProcess(value=0.0, tau_xi=p.tau_xi, sigma=p.sigma_xi, rng=noise_rng)
        xi = proc.path(OU_SAMPLES, dt)
        ou_std = float(np.std(xi))
        max_lag = int(3 * p.tau_xi / dt)
        acf = autocorrelation(xi, max_lag)
        acf_err = float(np.max(np.abs(acf - np.exp(-np.arange(max_lag + 1) * dt / p.tau_xi))))

        write_report(out_dir / "report.txt", {
            "sup_deviation": sup_dev, "stationary_mean": stationary, "tanh_law": target,
            "standard_error": std_err, "ou_std": ou_std, "ou_acf_max_error": acf_err,
        })
        checks = [
            check("mean-field deviation", sup_dev < 0.02, sup_dev, "< 0.02 over 10 tau_s"),
            check("stationary mean", abs(stationary - target) < 3 * std_err, stationary,
                  f"{target:.6g} +/- {3 * std_err:.3g}"),
            check("OU stationary std", abs(ou_std - p.sigma_xi) < 0.01 * p.sigma_xi, ou_std, "within 1% of sigma_xi"),
            check("OU autocorrelation", acf_err < 0.05, acf_err, "< 0.05 for lags up to 3 tau_xi"),
        ]
        return ScenarioResult(scenario=MicroOracleScenario.name, checks=checks, outputs=["report.txt"])
