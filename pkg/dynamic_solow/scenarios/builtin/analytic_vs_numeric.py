from __future__ import annotations

from pathlib import Path

import numpy as np

from ...artifacts import write_atomic, write_report
from ...config import RuntimeConfig
from ...dynamics import analytic_supply_path
from ...integrator import solve_supply_ode
from ...params import ModelParams, validate
from ...policies import SUPPLY_CURVE_B, SUPPLY_CURVE_CASE
from ..base import ScenarioResult, check


def _deviation(epsilon: float, window: tuple[float, float], n: int = 4001):
    p = validate(ModelParams(**{**SUPPLY_CURVE_CASE, "epsilon": epsilon}))
    t = np.linspace(0.0, 0.5 / epsilon, n)
    t, _, Y_num = solve_supply_ode(p, SUPPLY_CURVE_B, t)
    Y_ana = analytic_supply_path(t, p, SUPPLY_CURVE_B)
    rel = np.abs(Y_num - Y_ana) / Y_ana
    mask = (t >= window[0]) & (t <= window[1])
    return float(np.max(rel[mask])), t, Y_num, Y_ana


class AnalyticVsNumericScenario:
    name = "analytic_vs_numeric"
    description = "Boundary-layer output path against the numerical supply ODE"

    @staticmethod
    def run(out_dir: Path, runtime: RuntimeConfig) -> ScenarioResult:
        eps = SUPPLY_CURVE_CASE["epsilon"]
        tau_y = SUPPLY_CURVE_CASE["tau_y"]
        worst, t, Y_num, Y_ana = _deviation(eps, (tau_y, 0.5 / eps))

        # Timescale separation only affects the outer region; the inner
        # transient error depends on tau_y*delta, not on epsilon
        outer, *_ = _deviation(eps, (0.25 / eps, 0.5 / eps))
        outer_small, *_ = _deviation(eps / 10, (0.25 / (eps / 10), 0.5 / (eps / 10)))

        rows = "\n".join(f"{a:.17g},{b:.17g},{c:.17g}" for a, b, c in zip(t, Y_num, Y_ana))
        write_atomic(out_dir / "supply_path.csv", "t,Y_numeric,Y_analytic\n" + rows + "\n")
        write_report(out_dir / "report.txt", {"max_rel_deviation": worst, "outer_deviation": outer,
                                              "outer_deviation_eps_div_10": outer_small})
        checks = [
            check("max relative deviation", worst < 0.05, worst, "< 0.05 on [tau_y, 0.5/eps]"),
            check("separation improves accuracy", outer_small < outer, outer_small,
                  f"< {outer:.6g} (outer-region deviation at eps)"),
        ]
        return ScenarioResult(scenario=AnalyticVsNumericScenario.name, checks=checks,
                              outputs=["supply_path.csv", "report.txt"])
