"""
Time stepping for the general and reduced systems.

Both systems use explicit Euler for the deterministic part with the news
value held over each step and advanced by the exact OU map between steps.
The per-step loops are numba-compiled and run in chunks so that the normal
draws never need the whole horizon in memory.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numba as nb
import numpy as np
from scipy.integrate import solve_ivp

from .config import RuntimeConfig
from .dynamics import (
    FORCED_DEMAND,
    FORCED_SUPPLY,
    ReducedState,
    _rhs_full,
    _rhs_reduced,
    mode_code,
    supply_ode_rhs,
    supply_path_capital,
)
from .exceptions import InvalidSimConfig, NonFiniteState
from .params import SimConfig, ValidatedParams
from .policies import PORTRAIT_T_END, PORTRAIT_TOL
from .stochastic import noise_streams, ou_coefficients

logger = logging.getLogger(__name__)

FULL_COLUMNS = ("t", "y", "k_s", "k_d", "k", "s", "h", "xi")
REDUCED_COLUMNS = ("t", "s", "h", "z")


@dataclass(frozen=True, eq=False)
class Trajectory:
    """
    Decimated time series of one run.

    Columns are read-only arrays keyed by name; full runs also carry the
    per-sample regime flag (1 where k_d <= k_s).
    """

    columns: dict[str, np.ndarray]
    params: ValidatedParams
    config: SimConfig
    reduced: bool = False
    xi_on: bool = True
    regime: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        for arr in self.columns.values():
            arr.setflags(write=False)
        if self.regime is not None:
            self.regime.setflags(write=False)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]

    def __len__(self) -> int:
        return int(self.columns["t"].size)

    @property
    def t(self) -> np.ndarray:
        return self.columns["t"]

    @property
    def mode(self) -> str:
        return self.config.regime_mode

    @property
    def column_names(self) -> tuple[str, ...]:
        return REDUCED_COLUMNS if self.reduced else FULL_COLUMNS

    @property
    def sample_spacing(self) -> float:
        return self.config.dt * self.config.record_stride


@dataclass(frozen=True, eq=False)
class PortraitTrajectory:
    start: ReducedState
    trajectory: Trajectory
    label: str


# ============================================================================
# Compiled stepping loops
# ============================================================================


@nb.njit(cache=True, nogil=True)
def _advance_full(state, n0, n1, dt, p, mode, eta, decay, diffusion, hold, stride, rec_start, out, pos):
    y, ks, kd, s, h, xi = state[0], state[1], state[2], state[3], state[4], state[5]
    for n in range(n0, n1):
        if n >= rec_start and n % stride == 0:
            _record_full(out, pos, n * dt, y, ks, kd, s, h, xi, mode)
            pos += 1
        ydot, ksdot, kddot, sdot, hdot, clamped = _rhs_full(n * dt, y, ks, kd, s, h, xi, p, mode)
        if clamped:
            return pos, n
        y += dt * ydot
        ks += dt * ksdot
        kd += dt * kddot
        s += dt * sdot
        h += dt * hdot
        if (n + 1 - n0) % hold == 0:
            xi = decay * xi + diffusion * eta[(n + 1 - n0) // hold - 1]
        if not (np.isfinite(y) and np.isfinite(ks) and np.isfinite(kd) and np.isfinite(s) and np.isfinite(h)):
            return pos, n
        state[0] = y
        state[1] = ks
        state[2] = kd
        state[3] = s
        state[4] = h
        state[5] = xi
    return pos, -1


@nb.njit(cache=True, nogil=True)
def _record_full(out, pos, t, y, ks, kd, s, h, xi, mode):
    if mode == FORCED_SUPPLY:
        k = ks
    elif mode == FORCED_DEMAND:
        k = kd
    else:
        k = min(ks, kd)
    out[pos, 0] = t
    out[pos, 1] = y
    out[pos, 2] = ks
    out[pos, 3] = kd
    out[pos, 4] = k
    out[pos, 5] = s
    out[pos, 6] = h
    out[pos, 7] = xi


@nb.njit(cache=True, nogil=True)
def _advance_reduced(state, n0, n1, dt, p, eta, decay, diffusion, hold, stride, rec_start, out, pos):
    s, h, z, xi = state[0], state[1], state[2], state[3]
    for n in range(n0, n1):
        if n >= rec_start and n % stride == 0:
            out[pos, 0] = n * dt
            out[pos, 1] = s
            out[pos, 2] = h
            out[pos, 3] = z
            pos += 1
        sdot, hdot, zdot, clamped = _rhs_reduced(s, h, z, xi, p)
        if clamped:
            return pos, n
        s += dt * sdot
        h += dt * hdot
        z += dt * zdot
        if (n + 1 - n0) % hold == 0:
            xi = decay * xi + diffusion * eta[(n + 1 - n0) // hold - 1]
        if not (np.isfinite(s) and np.isfinite(h) and np.isfinite(z)):
            return pos, n
        state[0] = s
        state[1] = h
        state[2] = z
        state[3] = xi
    return pos, -1


# ============================================================================
# Drivers
# ============================================================================


def _record_layout(cfg: SimConfig) -> tuple[int, int, int]:
    """(total steps, first recorded step index, number of records)."""
    n_steps = cfg.n_steps
    rec_start = math.ceil(cfg.burn_in / cfg.dt - 1e-9)
    first = -(-rec_start // cfg.record_stride) * cfg.record_stride
    n_records = 0 if first > n_steps else (n_steps - first) // cfg.record_stride + 1
    return n_steps, rec_start, n_records


def _run_chunks(advance, state, cfg, p_arr, n_cols, sigma, tau_xi, runtime, extra=()):
    n_steps, rec_start, n_records = _record_layout(cfg)
    out = np.empty((n_records, n_cols))
    hold = cfg.noise_hold
    decay, diffusion = ou_coefficients(cfg.dt * hold, tau_xi, sigma)
    rng, _ = noise_streams(cfg.seed)
    chunk = max(hold, (runtime.chunk_steps // hold) * hold)

    pos = 0
    for n0 in range(0, n_steps, chunk):
        n1 = min(n0 + chunk, n_steps)
        n_updates = (n1 - n0) // hold
        eta = rng.standard_normal(n_updates) if diffusion > 0 else np.zeros(n_updates)
        if cfg.mirror_noise:
            eta = -eta
        pos, failed = advance(
            state, n0, n1, cfg.dt, p_arr, *extra, eta, decay, diffusion, hold,
            cfg.record_stride, rec_start, out, pos,
        )
        if failed >= 0:
            raise NonFiniteState("state diverged or hit the exponent clamp", step=failed)
    return out, pos, n_steps, rec_start


def simulate(p: ValidatedParams, cfg: SimConfig, runtime: RuntimeConfig | None = None) -> Trajectory:
    """
    Integrate the general-case system (or a forced regime) from ``cfg.initial``.

    Samples are taken every ``record_stride`` steps once the burn-in has
    passed; the result is bit-identical for identical (params, config).

    Raises:
        NonFiniteState: with the step index, if the run diverges
    """
    if cfg.regime_mode == "reduced_deterministic":
        return simulate_reduced(p, cfg, xi_on=False, runtime=runtime)
    runtime = runtime or RuntimeConfig()
    mode = mode_code(cfg.regime_mode)
    init = cfg.initial
    xi0 = -init.xi0 if cfg.mirror_noise else init.xi0
    state = np.array([init.resolved_y0(p), init.ks0, init.kd0, init.s0, init.h0, xi0])

    logger.info(
        f"simulate mode={cfg.regime_mode} t_end={cfg.t_end:g} dt={cfg.dt:g} seed={cfg.seed}"
    )
    out, pos, n_steps, rec_start = _run_chunks(
        _advance_full, state, cfg, p.as_array(), len(FULL_COLUMNS), p.sigma_xi, p.tau_xi, runtime, (mode,)
    )
    if n_steps >= rec_start and n_steps % cfg.record_stride == 0:
        y, ks, kd, s, h, xi = state
        _record_full(out, pos, n_steps * cfg.dt, y, ks, kd, s, h, xi, mode)
        pos += 1

    columns = {name: out[:pos, i].copy() for i, name in enumerate(FULL_COLUMNS)}
    regime = (columns["k_d"] <= columns["k_s"]).astype(np.int8)
    return Trajectory(columns=columns, params=p, config=cfg, regime=regime)


def simulate_reduced(
    p: ValidatedParams,
    cfg: SimConfig,
    xi_on: bool = True,
    start: ReducedState | None = None,
    runtime: RuntimeConfig | None = None,
) -> Trajectory:
    """
    Integrate the (s, h, z) system.

    With ``xi_on`` false the system is autonomous. ``start`` overrides the
    initial point derived from ``cfg.initial`` (z0 = rho*kd0 - y0).
    """
    if mode_code(cfg.regime_mode) < FORCED_DEMAND:
        raise InvalidSimConfig(
            "regime_mode", cfg.regime_mode, "reduced system needs forced_demand or reduced_deterministic"
        )
    runtime = runtime or RuntimeConfig()
    init = cfg.initial
    if start is None:
        start = ReducedState(s=init.s0, h=init.h0, z=p.rho * init.kd0 - init.resolved_y0(p))
    sigma = p.sigma_xi if xi_on else 0.0
    xi0 = -init.xi0 if cfg.mirror_noise else init.xi0
    state = np.array([start.s, start.h, start.z, xi0 if xi_on else 0.0])

    out, pos, n_steps, rec_start = _run_chunks(
        _advance_reduced, state, cfg, p.as_array(), len(REDUCED_COLUMNS), sigma, p.tau_xi, runtime
    )
    if n_steps >= rec_start and n_steps % cfg.record_stride == 0:
        out[pos] = (n_steps * cfg.dt, state[0], state[1], state[2])
        pos += 1

    columns = {name: out[:pos, i].copy() for i, name in enumerate(REDUCED_COLUMNS)}
    return Trajectory(columns=columns, params=p, config=cfg, reduced=True, xi_on=xi_on)


def phase_portrait(
    p: ValidatedParams,
    grid: Sequence[ReducedState],
    t_end: float = PORTRAIT_T_END,
    record_stride: int = 10,
    runtime: RuntimeConfig | None = None,
) -> list[PortraitTrajectory]:
    """
    Deterministic trajectories from each grid point, labeled by where they end.

    Labels are ``equilibrium:<i>`` (index into ``equilibria(p)``) when the
    final state is within tolerance of that point, ``cycle`` when the tail
    settles on a periodic orbit, and ``unresolved`` otherwise.
    """
    from .equilibria import cycle_from_series, equilibria

    points = equilibria(p)
    cfg = SimConfig(t_end=t_end, dt=1.0, record_stride=record_stride, regime_mode="reduced_deterministic")
    results = []
    for start in grid:
        traj = simulate_reduced(p, cfg, xi_on=False, start=start, runtime=runtime)
        end = np.array([traj["s"][-1], traj["h"][-1], traj["z"][-1]])
        label = "unresolved"
        for i, pt in enumerate(points):
            if np.max(np.abs(end - np.array([pt.s, pt.h, pt.z]))) < PORTRAIT_TOL:
                label = f"equilibrium:{i}"
                break
        else:
            if cycle_from_series(traj.t, traj["s"]) is not None:
                label = "cycle"
        logger.debug(f"portrait start=({start.s}, {start.h}, {start.z}) -> {label}")
        results.append(PortraitTrajectory(start=start, trajectory=traj, label=label))
    return results


def solve_supply_ode(p: ValidatedParams, B: float, t_eval: np.ndarray, rtol: float = 1e-10):
    """
    Numerically solve the second-order supply equation.

    The solution starts on the closed-form curve at t = 0; returns
    ``(t, K, Y)`` with Y recovered from K' = lambda*Y - delta*K.
    """
    t_eval = np.asarray(t_eval, dtype=float)
    K0, Kdot0 = supply_path_capital(0.0, p, B)

    def rhs(t, u):
        return [u[1], supply_ode_rhs(u[0], u[1], t, p)]

    sol = solve_ivp(
        rhs, (0.0, float(t_eval[-1])), [float(K0), float(Kdot0)],
        method="RK45", t_eval=t_eval, rtol=rtol, atol=1e-12 * float(K0),
    )
    if not sol.success:
        raise NonFiniteState(f"supply ODE solver failed: {sol.message}")
    K, Kdot = sol.y
    return sol.t, K, (Kdot + p.delta * K) / p.lambda_
