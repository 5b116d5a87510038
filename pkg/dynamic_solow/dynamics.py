"""
Right-hand sides of the general and reduced systems.

The scalar kernels are numba-compiled so the integrator can call them from
its own compiled loops; the public wrappers take the typed state objects,
check finiteness and return typed derivatives.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numba as nb
import numpy as np

from .exceptions import InvalidSimConfig, NonFiniteState, NonPositiveCapital
from .params import ModelParams
from .policies import EXP_CLAMP

logger = logging.getLogger(__name__)

# Indices into ModelParams.as_array()
RHO, EPS, TAU_Y, LAM, DELTA, C1, C2, BETA1, BETA2, GAMMA, TAU_S, TAU_H, TAU_XI, SIGMA_XI = range(14)

# Regime codes shared with the compiled kernels
GENERAL = 0
FORCED_SUPPLY = 1
FORCED_DEMAND = 2
REDUCED_DETERMINISTIC = 3

MODE_CODES = {
    "general": GENERAL,
    "forced_supply": FORCED_SUPPLY,
    "forced_demand": FORCED_DEMAND,
    "reduced_deterministic": REDUCED_DETERMINISTIC,
}


def mode_code(regime_mode: str | int) -> int:
    if isinstance(regime_mode, (int, np.integer)):
        return int(regime_mode)
    try:
        return MODE_CODES[regime_mode]
    except KeyError:
        raise InvalidSimConfig("regime_mode", regime_mode, f"expected one of {list(MODE_CODES)}") from None


@dataclass(frozen=True)
class FullState:
    t: float
    y: float
    k_s: float
    k_d: float
    s: float
    h: float
    xi: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.t, self.y, self.k_s, self.k_d, self.s, self.h, self.xi])


@dataclass(frozen=True)
class ReducedState:
    s: float
    h: float
    z: float

    def as_array(self) -> np.ndarray:
        return np.array([self.s, self.h, self.z])


@dataclass(frozen=True)
class Derivatives:
    """Per-day derivatives of (y, k_s, k_d, s, h)."""

    y: float
    k_s: float
    k_d: float
    s: float
    h: float

    def as_array(self) -> np.ndarray:
        return np.array([self.y, self.k_s, self.k_d, self.s, self.h])


@dataclass(frozen=True)
class ReducedDerivatives:
    """Per-day derivatives of (s, h, z)."""

    s: float
    h: float
    z: float

    def as_array(self) -> np.ndarray:
        return np.array([self.s, self.h, self.z])


def clearing(k_s: float, k_d: float) -> float:
    """Log invested capital under inelastic clearing."""
    return min(k_s, k_d)


def feedback_gate(k_s: float, k_d: float) -> int:
    """1 while demand is the binding side (k_d <= k_s), else 0."""
    return 1 if k_d <= k_s else 0


# ============================================================================
# Compiled kernels
# ============================================================================


@nb.njit(cache=True, nogil=True)
def _exp_clamped(x):
    if x > EXP_CLAMP:
        return math.exp(EXP_CLAMP), True
    return math.exp(x), False


@nb.njit(cache=True, nogil=True)
def _expm1_clamped(x):
    if x > EXP_CLAMP:
        return math.expm1(EXP_CLAMP), True
    return math.expm1(x), False


@nb.njit(cache=True, nogil=True)
def _rhs_full(t, y, ks, kd, s, h, xi, p, mode):
    if mode == FORCED_SUPPLY:
        k = ks
        gate = 0.0
    elif mode == FORCED_DEMAND:
        k = kd
        gate = 1.0
    elif kd <= ks:
        k = kd
        gate = 1.0
    else:
        k = ks
        gate = 0.0

    g, c0 = _expm1_clamped(p[RHO] * k + p[EPS] * t - y)
    ydot = g / p[TAU_Y]
    e_out, c1 = _exp_clamped(y - ks)
    # Depreciation never exceeds delta*K_s, even when forced demand runs above supply
    e_inv, c2 = _exp_clamped(min(k, ks) - ks)
    ksdot = p[LAM] * e_out - p[DELTA] * e_inv
    sdot = (-s + math.tanh(p[BETA1] * s + p[BETA2] * h)) / p[TAU_S]
    kddot = p[C1] * sdot + p[C2] * s
    hdot = (-h + math.tanh(p[GAMMA] * ydot * gate + xi)) / p[TAU_H]
    return ydot, ksdot, kddot, sdot, hdot, c0 or c1 or c2


@nb.njit(cache=True, nogil=True)
def _rhs_reduced(s, h, z, xi, p):
    sdot = (-s + math.tanh(p[BETA1] * s + p[BETA2] * h)) / p[TAU_S]
    g, clamped = _expm1_clamped(z)
    growth = g / p[TAU_Y]
    zdot = p[RHO] * p[C1] * sdot + p[RHO] * p[C2] * s - growth + p[EPS]
    hdot = (-h + math.tanh(p[GAMMA] * growth + xi)) / p[TAU_H]
    return sdot, hdot, zdot, clamped


# ============================================================================
# Public wrappers
# ============================================================================


def _require_finite(values, what: str) -> None:
    if not all(math.isfinite(v) for v in values):
        raise NonFiniteState(f"non-finite {what}: {tuple(values)}")


def rhs_full(state: FullState, p: ModelParams, regime_mode: str | int = "general") -> Derivatives:
    """
    Derivatives of the general-case system.

    Args:
        state: Current state; ``state.xi`` is the news value held over the step
        p: Validated parameters
        regime_mode: "general" gates feedback by clearing, "forced_supply"
            pins k = k_s and switches feedback off, "forced_demand" pins
            k = k_d with feedback always on; depreciation in the supply
            equation is taken on min(k, k_s) in every mode

    Raises:
        NonFiniteState: on non-finite input or when an exponent hits the clamp
    """
    _require_finite(state.as_array(), "state")
    mode = mode_code(regime_mode)
    ydot, ksdot, kddot, sdot, hdot, clamped = _rhs_full(
        state.t, state.y, state.k_s, state.k_d, state.s, state.h, state.xi, p.as_array(), mode
    )
    if clamped:
        raise NonFiniteState("exponent clamp reached")
    return Derivatives(y=ydot, k_s=ksdot, k_d=kddot, s=sdot, h=hdot)


def rhs_reduced(state: ReducedState, p: ModelParams, xi: float = 0.0) -> ReducedDerivatives:
    _require_finite((state.s, state.h, state.z, xi), "reduced state")
    sdot, hdot, zdot, clamped = _rhs_reduced(state.s, state.h, state.z, xi, p.as_array())
    if clamped:
        raise NonFiniteState("exponent clamp reached")
    return ReducedDerivatives(s=sdot, h=hdot, z=zdot)


def jacobian_reduced(state: ReducedState, p: ModelParams) -> np.ndarray:
    """Analytic Jacobian of (s', h', z') with respect to (s, h, z), noise off. Per-day units."""
    _require_finite((state.s, state.h, state.z), "reduced state")
    s, h, z = state.s, state.h, state.z
    ez, clamped = _exp_clamped(z)
    if clamped:
        raise NonFiniteState("exponent clamp reached")
    omega = 1.0 / p.tau_y
    sech2_a = 1.0 - math.tanh(p.beta1 * s + p.beta2 * h) ** 2
    sech2_b = 1.0 - math.tanh(p.gamma * omega * _expm1_clamped(z)[0]) ** 2

    ds_ds = (-1.0 + p.beta1 * sech2_a) / p.tau_s
    ds_dh = p.beta2 * sech2_a / p.tau_s
    return np.array(
        [
            [ds_ds, ds_dh, 0.0],
            [0.0, -1.0 / p.tau_h, p.gamma * omega * ez * sech2_b / p.tau_h],
            [p.rho * p.c1 * ds_ds + p.rho * p.c2, p.rho * p.c1 * ds_dh, -omega * ez],
        ]
    )


# ============================================================================
# Supply-driven limit
# ============================================================================


def supply_path_capital(t, p: ModelParams, B: float):
    """Capital level K(t) of the boundary-layer solution and its time derivative."""
    t = np.asarray(t, dtype=float)
    inv = 1.0 / (1.0 - p.rho)
    a = (1.0 - p.rho) / p.tau_y
    R = p.epsilon * inv
    K_m = (p.lambda_ / p.delta) ** inv
    decay = B * np.exp(-a * t)
    K = K_m * ((decay + 1.0) ** inv + np.exp(R * t) - 1.0)
    Kdot = K_m * (-a * inv * decay * (decay + 1.0) ** (p.rho * inv) + R * np.exp(R * t))
    return K, Kdot


def analytic_supply_path(t, p: ModelParams, B: float):
    """
    Closed-form output level Y(t) in the supply-driven regime.

    Accurate once t is a few tau_y in and tau_y * delta >> 1.
    """
    t = np.asarray(t, dtype=float)
    inv = 1.0 / (1.0 - p.rho)
    a = (1.0 - p.rho) / p.tau_y
    Y = (p.lambda_ / p.delta) ** (p.rho * inv) * (
        (B * np.exp(-a * t) + 1.0) ** inv + np.exp(p.epsilon * inv * t) - 1.0
    )
    return float(Y) if Y.ndim == 0 else Y


def supply_ode_rhs(K: float, Kdot: float, t: float, p: ModelParams) -> float:
    """K'' of tau_y K'' + (1 + tau_y delta) K' + delta K = lambda K^rho e^{eps t}."""
    if not K > 0:
        raise NonPositiveCapital(f"capital must be > 0, got K={K!r} at t={t!r}")
    return (
        p.lambda_ * K**p.rho * math.exp(p.epsilon * t) - (1.0 + p.tau_y * p.delta) * Kdot - p.delta * K
    ) / p.tau_y
