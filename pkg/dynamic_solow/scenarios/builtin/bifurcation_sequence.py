from __future__ import annotations

from pathlib import Path

from ...artifacts import write_scan_csv
from ...config import RuntimeConfig
from ...equilibria import bifurcation_scan, scan_grid
from ...params import ModelParams, validate
from ..base import ScenarioResult, check

GAMMAS = (350.0, 1000.0, 4000.0, 15000.0)
C2 = 1e-4
EXPECTED_CYCLES = (False, True, True, False)
EXPECTED_COUNTS = (3, 3, 1, 1)


class BifurcationSequenceScenario:
    name = "bifurcation_sequence"
    description = "c2=1e-4 with increasing gamma: stable, cycle, cycle with one equilibrium, stable again"

    @staticmethod
    def run(out_dir: Path, runtime: RuntimeConfig) -> ScenarioResult:
        p = validate(ModelParams())
        records = bifurcation_scan(p, GAMMAS, [C2], runtime.parallelism)
        extra = scan_grid(p, [{"gamma": 2000.0, "c2": 7e-4}, {"gamma": 1000.0, "c2": 2e-5}], runtime.parallelism)
        write_scan_csv(out_dir / "scan.csv", records + extra)

        cycles = tuple(r.limit_cycle is not None for r in records)
        counts = tuple(len(r.equilibria) for r in records)
        base, cycle_case = extra
        checks = [
            check("cycle pattern", cycles == EXPECTED_CYCLES, cycles, str(EXPECTED_CYCLES)),
            check("equilibrium counts", counts == EXPECTED_COUNTS, counts, str(EXPECTED_COUNTS)),
            check("base case bistable", len(base.equilibria) == 3 and base.limit_cycle is None,
                  f"{len(base.equilibria)} equilibria, cycle={base.limit_cycle is not None}", "3 equilibria, no cycle"),
            check("weak demand cycle", cycle_case.limit_cycle is not None,
                  f"cycle={cycle_case.limit_cycle is not None}", "cycle at gamma=1000, c2=2e-5"),
        ]
        return ScenarioResult(scenario=BifurcationSequenceScenario.name, checks=checks, outputs=["scan.csv"])
