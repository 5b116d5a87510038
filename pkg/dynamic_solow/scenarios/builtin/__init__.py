from __future__ import annotations

from ...registry import register_scenario
from .supply_growth import SupplyGrowthScenario
from .analytic_vs_numeric import AnalyticVsNumericScenario
from .limit_cycle_stagnation import LimitCycleStagnationScenario
from .coherence_growth import CoherenceGrowthScenario
from .general_growth import GeneralGrowthScenario
from .cycle_histogram import CycleHistogramScenario
from .regime_fraction import RegimeFractionScenario
from .bifurcation_sequence import BifurcationSequenceScenario
from .equilibria_base import EquilibriaBaseScenario
from .micro_oracle import MicroOracleScenario

# Register builtin scenarios on import
register_scenario(SupplyGrowthScenario)
register_scenario(AnalyticVsNumericScenario)
register_scenario(LimitCycleStagnationScenario)
register_scenario(CoherenceGrowthScenario)
register_scenario(GeneralGrowthScenario)
register_scenario(CycleHistogramScenario)
register_scenario(RegimeFractionScenario)
register_scenario(BifurcationSequenceScenario)
register_scenario(EquilibriaBaseScenario)
register_scenario(MicroOracleScenario)
