"""
Constants and numerical policies for the Dynamic Solow toolkit.

Base-case model values, solver tolerances and analysis conventions live
here so that every module (and every test) reads them from one place.
"""

from __future__ import annotations

# ============================================================================
# Time conventions
# ============================================================================

# Business days per year
DAYS_PER_YEAR = 250

# ============================================================================
# Base-case model parameters
# ============================================================================

BASE_CASE = {
    "rho": 1.0 / 3.0,  # capital share
    "epsilon": 2.5e-5,  # technology growth rate, per day
    "tau_y": 1000.0,  # production adjustment timescale, days
    "lambda": 0.15,  # savings rate
    "delta": 2e-4,  # depreciation rate, per day
    "c1": 3.0,  # demand sensitivity to sentiment change
    "c2": 7e-4,  # demand sensitivity to sentiment level, per day
    "beta1": 1.1,  # herding
    "beta2": 1.0,  # sentiment-information coupling
    "gamma": 2000.0,  # feedback strength, days
    "tau_s": 250.0,  # sentiment timescale, days
    "tau_h": 25.0,  # information timescale, days
    "tau_xi": 5.0,  # news decorrelation timescale, days
    "sigma_xi": 1.0,  # stationary news standard deviation
}

# Parameters used for the boundary-layer comparison of the supply regime
SUPPLY_CURVE_CASE = {
    "rho": 1.0 / 3.0,
    "tau_y": 1000.0,
    "lambda": 0.15,
    "epsilon": 1e-5,
    "delta": 0.02,
}
SUPPLY_CURVE_B = 1.5

# ============================================================================
# Simulation defaults
# ============================================================================

DEFAULT_T_END = 250.0 * 400
DEFAULT_DT = 1.0
DEFAULT_RECORD_STRIDE = 25
DEFAULT_SEED = 0

# Initial log capital for the default (non-balanced) start
DEFAULT_LOG_CAPITAL = 1.0

REGIME_MODES = ("general", "forced_supply", "forced_demand", "reduced_deterministic")

# Exponentials of log differences are clamped at e^EXP_CLAMP
EXP_CLAMP = 50.0

# Normal draws are generated this many steps at a time
DEFAULT_CHUNK_STEPS = 2**18

# ============================================================================
# Equilibria
# ============================================================================

ROOT_GRID_POINTS = 10_000
ROOT_GRID_EDGE = 1e-6
ROOT_XTOL = 1e-12

NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 50
NEWTON_MIN_DAMPING = 1.0 / 1024

# Residual bound every reported equilibrium must meet
EQUILIBRIUM_RESIDUAL = 1e-10

# Eigenvalue with |Im| above this is complex
COMPLEX_TOL = 1e-9
# Real part within this of zero makes stability marginal
MARGINAL_TOL = 1e-12

# ============================================================================
# Limit cycles and phase portraits
# ============================================================================

CYCLE_T_END = 400_000.0
CYCLE_MIN_INTERVALS = 5
CYCLE_SPREAD = 0.01
# Smallest peak-to-peak sentiment swing that counts as an oscillation
CYCLE_MIN_AMPLITUDE = 1e-3

PROBE_STATES = (
    (-0.5, -0.5, -0.1),
    (0.5, 0.5, 0.1),
    (0.1, -0.3, 0.05),
    (-0.2, 0.4, -0.05),
)

PORTRAIT_T_END = 100_000.0
PORTRAIT_TOL = 1e-3
PORTRAIT_S = (-0.8, -0.4, 0.4, 0.8)
PORTRAIT_H = (-0.8, 0.8)
PORTRAIT_Z = (-0.2, 0.2)

# ============================================================================
# Analysis
# ============================================================================

MIN_WINDOW_SAMPLES = 100

HIST_BIN_YEARS = 5.0
HIST_RANGE_YEARS = (10.0, 150.0)
HIST_BAND_YEARS = (40.0, 70.0)

# Periods shorter than this are removed by the display filter, days
LOWPASS_PERIOD = 500.0

# Relative spacing tolerance for uniform sampling checks
UNIFORM_TOL = 1e-9

# ============================================================================
# Micro ensemble
# ============================================================================

MICRO_ALPHA = 2.0
MICRO_AGENTS = 100_000

# ============================================================================
# CLI exit codes
# ============================================================================

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_NUMERICAL = 4
EXIT_UNKNOWN_SCENARIO = 5

# ============================================================================
# Reproduction scenarios
# ============================================================================

SCENARIO_SEED = 7
ENSEMBLE_SEEDS = 8
