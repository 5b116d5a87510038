from __future__ import annotations

from pathlib import Path

from ...artifacts import write_report
from ...config import RuntimeConfig
from ...equilibria import condition_forms_disagree, detect_limit_cycle, equilibria, probe_states
from ...params import ModelParams, validate
from ...policies import EQUILIBRIUM_RESIDUAL
from ..base import ScenarioResult, check
from ..runs import jacobian_check

EXPECTED_BASE = (("focus", "stable"), ("saddle", "unstable"), ("focus", "stable"))


class EquilibriaBaseScenario:
    name = "equilibria_base"
    description = "Fixed points of the reduced system: bistable base case, single unstable focus past the bifurcation"

    @staticmethod
    def run(out_dir: Path, runtime: RuntimeConfig) -> ScenarioResult:
        p = validate(ModelParams())
        points = equilibria(p)
        classes = tuple((pt.kind, pt.stability) for pt in points)
        signs_ok = len(points) == 3 and points[0].s < 0 < points[2].s
        worst_residual = max((pt.residual for pt in points), default=float("nan"))

        q = p.with_overrides(gamma=4000.0, c2=1e-4)
        super_points = equilibria(q)
        cycle = None
        for probe in probe_states():
            cycle = detect_limit_cycle(q, probe, runtime=runtime)
            if cycle is not None:
                break

        jac_error = jacobian_check(p)
        report = {
            "base_points": [f"s={pt.s:.6f} h={pt.h:.6f} z={pt.z:.6f} {pt.kind}/{pt.stability}" for pt in points],
            "condition_forms_disagree": condition_forms_disagree(p),
            "supercritical_points": [f"s={pt.s:.6f} {pt.kind}/{pt.stability}" for pt in super_points],
            "cycle_period_days": cycle.period if cycle else None,
            "jacobian_max_rel_error": jac_error,
        }
        write_report(out_dir / "report.txt", report)
        checks = [
            check("base classification", classes == EXPECTED_BASE and signs_ok, classes, str(EXPECTED_BASE)),
            check("base residual", worst_residual < EQUILIBRIUM_RESIDUAL, worst_residual, f"< {EQUILIBRIUM_RESIDUAL}"),
            check("supercritical focus",
                  len(super_points) == 1 and (super_points[0].kind, super_points[0].stability) == ("focus", "unstable"),
                  [(pt.kind, pt.stability) for pt in super_points], "one unstable focus"),
            check("supercritical cycle", cycle is not None, "none" if cycle is None else f"period {cycle.period:.6g} d",
                  "stable limit cycle"),
            check("jacobian vs finite differences", jac_error < 1e-6, jac_error, "< 1e-6 relative"),
        ]
        return ScenarioResult(scenario=EquilibriaBaseScenario.name, checks=checks, outputs=["report.txt"])
