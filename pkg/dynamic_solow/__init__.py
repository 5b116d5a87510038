"""
dynamic_solow: simulator and analysis toolkit for the Dynamic Solow model.

- Interactions-based capital demand coupled to Solow-type capital supply
- Sentiment/information dynamics driven by Ornstein-Uhlenbeck news noise
- Equilibria, limit cycles and bifurcation scans of the reduced (s, h, z) system
- Growth-rate, regime and cycle-duration statistics of long runs

Usage (programmatic):
    from dynamic_solow import ModelParams, SimConfig, simulate, validate

    p = validate(ModelParams(gamma=4000, c2=1e-4))
    traj = simulate(p, SimConfig(regime_mode="forced_demand", seed=1))

You can also run as a module:
    python -m dynamic_solow reproduce equilibria_base --out runs
"""

from .analysis import (
    asymptotic_report,
    cycle_durations,
    detrend,
    duration_histogram,
    fourier_lowpass,
    growth_rate,
    mean_sentiment,
    regime_fraction,
)
from .config import RuntimeConfig
from .dynamics import (
    FullState,
    ReducedState,
    analytic_supply_path,
    clearing,
    feedback_gate,
    jacobian_reduced,
    rhs_full,
    rhs_reduced,
    supply_ode_rhs,
)
from .equilibria import (
    bifurcation_scan,
    classify,
    detect_limit_cycle,
    equilibria,
    sentiment_equilibrium_roots,
)
from .integrator import Trajectory, phase_portrait, simulate, simulate_reduced, solve_supply_ode
from .params import (
    InitialState,
    ModelParams,
    SimConfig,
    ValidatedParams,
    derived_quantities,
    dump_config,
    load_config,
    validate,
)
from .registry import get_scenario, register_scenario, scenario_names
from .stochastic import MicroEnsemble, NoiseProcess, micro_ensemble_step, micro_transition_rates, ou_step

# Ensure builtin scenarios are registered on import
from .scenarios import builtin as _builtin_scenarios  # noqa: F401

__all__ = [
    "InitialState",
    "FullState",
    "MicroEnsemble",
    "ModelParams",
    "NoiseProcess",
    "ReducedState",
    "RuntimeConfig",
    "SimConfig",
    "Trajectory",
    "ValidatedParams",
    "analytic_supply_path",
    "asymptotic_report",
    "bifurcation_scan",
    "classify",
    "clearing",
    "cycle_durations",
    "derived_quantities",
    "detect_limit_cycle",
    "detrend",
    "dump_config",
    "duration_histogram",
    "equilibria",
    "feedback_gate",
    "fourier_lowpass",
    "get_scenario",
    "growth_rate",
    "jacobian_reduced",
    "load_config",
    "mean_sentiment",
    "micro_ensemble_step",
    "micro_transition_rates",
    "ou_step",
    "phase_portrait",
    "regime_fraction",
    "register_scenario",
    "rhs_full",
    "rhs_reduced",
    "scenario_names",
    "sentiment_equilibrium_roots",
    "simulate",
    "simulate_reduced",
    "solve_supply_ode",
    "supply_ode_rhs",
    "validate",
]
