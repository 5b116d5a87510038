from __future__ import annotations

from pathlib import Path

import numpy as np

from ...analysis import regime_fraction
from ...artifacts import write_report
from ...config import RuntimeConfig
from ...params import ModelParams, validate
from ..base import ScenarioResult, check
from ..runs import general_ensemble


class RegimeFractionScenario:
    name = "regime_fraction"
    description = "General mode, base case, 50,000 years, 8 seeds: demand below supply about 70% of the time"

    @staticmethod
    def run(out_dir: Path, runtime: RuntimeConfig) -> ScenarioResult:
        p = validate(ModelParams())
        fractions = [regime_fraction(tr) for tr in general_ensemble(p, runtime)]
        mean = float(np.mean(fractions))
        write_report(out_dir / "report.txt", {"mean_fraction": mean, "fractions": fractions})
        checks = [check("demand-driven fraction", 0.60 <= mean <= 0.80, mean, "in [0.60, 0.80]")]
        return ScenarioResult(scenario=RegimeFractionScenario.name, checks=checks, outputs=["report.txt"])
