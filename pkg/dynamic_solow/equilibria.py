"""
Fixed points of the reduced (s, h, z) system, their stability, and limit cycles.

Usage:
    from dynamic_solow.equilibria import equilibria, bifurcation_scan

    for pt in equilibria(p):
        print(pt.s, pt.kind, pt.stability)
    records = bifurcation_scan(p, gamma_values=[350, 1000], c2_values=[1e-4])
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.optimize import bisect

from .analysis import upward_crossings
from .config import RuntimeConfig
from .dynamics import ReducedState, jacobian_reduced, rhs_reduced
from .exceptions import DynamicSolowError, NegativeRate, NewtonDivergence, NonFiniteState
from .integrator import simulate_reduced
from .orchestrator import run_parallel
from .params import SimConfig, ValidatedParams
from .policies import (
    COMPLEX_TOL,
    CYCLE_MIN_AMPLITUDE,
    CYCLE_MIN_INTERVALS,
    CYCLE_SPREAD,
    CYCLE_T_END,
    MARGINAL_TOL,
    NEWTON_MAX_ITER,
    NEWTON_MIN_DAMPING,
    NEWTON_TOL,
    PROBE_STATES,
    ROOT_GRID_EDGE,
    ROOT_GRID_POINTS,
    ROOT_XTOL,
)

logger = logging.getLogger(__name__)

Kind = Literal["node", "focus", "saddle"]
Stability = Literal["stable", "unstable", "marginal"]


@dataclass(frozen=True)
class EquilibriumPoint:
    s: float
    h: float
    z: float
    eigenvalues: tuple[complex, complex, complex]
    kind: Kind
    stability: Stability
    residual: float = 0.0

    @property
    def state(self) -> ReducedState:
        return ReducedState(s=self.s, h=self.h, z=self.z)


class LimitCycle(BaseModel):
    model_config = ConfigDict(frozen=True)

    period: float  # days
    amplitude: float  # max |s - mean(s)|
    spread: float  # relative spread of the last inter-crossing intervals


@dataclass(frozen=True)
class BifurcationRecord:
    gamma: float
    c2: float
    equilibria: tuple[EquilibriumPoint, ...] = ()
    limit_cycle: LimitCycle | None = None
    error: str | None = field(default=None)


# ============================================================================
# Sentiment condition
# ============================================================================


def _condition(p: ValidatedParams, form: str):
    if form == "derived":
        def f(s):
            return np.arctanh(s) - p.beta1 * s - p.beta2 * np.tanh(p.gamma * (p.rho * p.c2 * s + p.epsilon))
    elif form == "printed":
        def f(s):
            return np.arctanh(s) - p.beta1 * s - p.beta2 * np.tanh(p.gamma * p.c2 * s + p.gamma * p.epsilon)
    else:
        raise ValueError(f"Unknown condition form '{form}'. Expected 'derived' or 'printed'")
    return f


def sentiment_equilibrium_roots(p: ValidatedParams, form: str = "derived") -> list[float]:
    """
    All sentiment values in (-1, 1) where the reduced system can rest.

    ``form="derived"`` uses the argument gamma*(rho*c2*s + eps) that follows
    from setting all three derivatives to zero; ``form="printed"`` uses
    gamma*c2*s + gamma*eps.
    """
    if p.beta2 < 0:
        raise NegativeRate("beta2", p.beta2, "equilibrium search needs beta2 >= 0")
    f = _condition(p, form)
    grid = np.linspace(-1.0 + ROOT_GRID_EDGE, 1.0 - ROOT_GRID_EDGE, ROOT_GRID_POINTS)
    values = f(grid)

    roots = [float(x) for x in grid[values == 0.0]]
    for i in np.flatnonzero(values[:-1] * values[1:] < 0):
        roots.append(float(bisect(f, grid[i], grid[i + 1], xtol=ROOT_XTOL)))
        logger.debug(f"root bracket [{grid[i]:.6f}, {grid[i + 1]:.6f}] -> {roots[-1]:.12f}")
    return sorted(roots)


def condition_forms_disagree(p: ValidatedParams) -> bool:
    """True (and logged) when the derived and printed conditions give different root counts."""
    derived = sentiment_equilibrium_roots(p, "derived")
    printed = sentiment_equilibrium_roots(p, "printed")
    if len(derived) != len(printed):
        logger.warning(
            f"equilibrium condition forms disagree: derived form has {len(derived)} root(s), "
            f"printed form has {len(printed)}"
        )
        return True
    return False


# ============================================================================
# Classification and refinement
# ============================================================================


def classify(eigenvalues: Sequence[complex]) -> tuple[Kind, Stability]:
    """
    Kind and stability from the Jacobian spectrum.

    A complex pair makes a focus; otherwise real eigenvalues of one sign
    make a node and mixed signs a saddle. Real parts within the marginal
    tolerance of zero leave stability undetermined.
    """
    ev = np.asarray(eigenvalues, dtype=complex)
    re = ev.real
    if np.any(np.abs(ev.imag) > COMPLEX_TOL):
        kind: Kind = "focus"
    elif np.any(re > MARGINAL_TOL) and np.any(re < -MARGINAL_TOL):
        kind = "saddle"
    else:
        kind = "node"

    if np.any(re > MARGINAL_TOL):
        stability: Stability = "unstable"
    elif np.any(np.abs(re) <= MARGINAL_TOL):
        stability = "marginal"
    else:
        stability = "stable"
    return kind, stability


def _residual(x: np.ndarray, p: ValidatedParams) -> np.ndarray:
    return rhs_reduced(ReducedState(*x), p, 0.0).as_array()


def _newton(x: np.ndarray, p: ValidatedParams, root: float) -> tuple[np.ndarray, float]:
    F = _residual(x, p)
    norm = float(np.max(np.abs(F)))
    for it in range(NEWTON_MAX_ITER):
        if norm < NEWTON_TOL:
            return x, norm
        try:
            dx = np.linalg.solve(jacobian_reduced(ReducedState(*x), p), -F)
        except np.linalg.LinAlgError:
            break
        step = 1.0
        while step >= NEWTON_MIN_DAMPING:
            trial = x + step * dx
            try:
                F_trial = _residual(trial, p)
            except NonFiniteState:
                F_trial = None
            if F_trial is not None and np.max(np.abs(F_trial)) < norm:
                x, F, norm = trial, F_trial, float(np.max(np.abs(F_trial)))
                break
            step /= 2.0
        else:
            break
        logger.debug(f"newton root={root:.6f} iter={it} residual={norm:.3e}")
    if norm < NEWTON_TOL:
        return x, norm
    raise NewtonDivergence(root, norm)


def equilibria(p: ValidatedParams) -> list[EquilibriumPoint]:
    """
    Refined and classified fixed points of the noise-free reduced system, ordered by s.

    Raises:
        NewtonDivergence: if a root cannot be refined below the residual tolerance
    """
    points = []
    for s in sentiment_equilibrium_roots(p):
        g = p.rho * p.c2 * s + p.epsilon
        if 1.0 + p.tau_y * g <= 0:
            logger.warning(f"skipping sentiment root s={s:.6f}: no real z satisfies the growth balance")
            continue
        guess = np.array([s, math.tanh(p.gamma * g), math.log1p(p.tau_y * g)])
        x, residual = _newton(guess, p, s)
        eig = np.linalg.eigvals(jacobian_reduced(ReducedState(*x), p))
        eig = eig[np.lexsort((eig.imag, eig.real))]
        kind, stability = classify(eig)
        points.append(
            EquilibriumPoint(
                s=float(x[0]), h=float(x[1]), z=float(x[2]),
                eigenvalues=tuple(complex(e) for e in eig),
                kind=kind, stability=stability, residual=residual,
            )
        )
    return points


# ============================================================================
# Limit cycles
# ============================================================================


def cycle_from_series(t: np.ndarray, s: np.ndarray) -> LimitCycle | None:
    """
    Decide whether the second half of a deterministic sentiment path is periodic.

    The last inter-crossing intervals must agree within the spread tolerance
    and each interval must swing by a non-decaying, non-trivial amount;
    damped oscillations into a focus therefore never qualify.
    """
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    tail = t >= t[0] + 0.5 * (t[-1] - t[0])
    t, s = t[tail], s[tail]
    if t.size < 3:
        return None

    x = s
    crossings = upward_crossings(t, x)
    if crossings.size < 2:
        x = s - np.mean(s)
        crossings = upward_crossings(t, x)
    if crossings.size < CYCLE_MIN_INTERVALS + 1:
        return None

    intervals = np.diff(crossings)[-CYCLE_MIN_INTERVALS:]
    spread = float((intervals.max() - intervals.min()) / intervals.mean())
    if spread >= CYCLE_SPREAD:
        return None

    edges = crossings[-CYCLE_MIN_INTERVALS - 1:]
    swings = np.array([np.ptp(x[(t >= a) & (t <= b)]) for a, b in zip(edges[:-1], edges[1:])])
    if swings.min() < CYCLE_MIN_AMPLITUDE:
        return None
    if (swings.max() - swings.min()) / swings.mean() >= CYCLE_SPREAD:
        return None

    return LimitCycle(
        period=float(intervals.mean()),
        amplitude=float(np.max(np.abs(s - np.mean(s)))),
        spread=spread,
    )


def detect_limit_cycle(
    p: ValidatedParams,
    probe: ReducedState,
    t_end: float = CYCLE_T_END,
    record_stride: int = 1,
    runtime: RuntimeConfig | None = None,
) -> LimitCycle | None:
    cfg = SimConfig(t_end=t_end, dt=1.0, record_stride=record_stride, regime_mode="reduced_deterministic")
    try:
        traj = simulate_reduced(p, cfg, xi_on=False, start=probe, runtime=runtime)
    except NonFiniteState as e:
        logger.warning(f"limit-cycle probe ({probe.s}, {probe.h}, {probe.z}) diverged: {e}")
        return None
    return cycle_from_series(traj.t, traj["s"])


def probe_states() -> list[ReducedState]:
    return [ReducedState(*x) for x in PROBE_STATES]


def scan_point(p: ValidatedParams, overrides: dict[str, float], t_end: float = CYCLE_T_END) -> BifurcationRecord:
    """Equilibria plus probe-set limit-cycle detection at one parameter point."""
    gamma = float(overrides.get("gamma", p.gamma))
    c2 = float(overrides.get("c2", p.c2))
    try:
        q = p.with_overrides(**overrides)
        points = tuple(equilibria(q))
    except DynamicSolowError as e:
        logger.warning(f"scan point {overrides} failed: {e}")
        return BifurcationRecord(gamma=gamma, c2=c2, error=f"{type(e).__name__}: {e}")

    cycle = None
    for probe in probe_states():
        cycle = detect_limit_cycle(q, probe, t_end=t_end)
        if cycle is not None:
            break
    return BifurcationRecord(gamma=gamma, c2=c2, equilibria=points, limit_cycle=cycle)


def bifurcation_scan(
    p: ValidatedParams,
    gamma_values: Sequence[float],
    c2_values: Sequence[float],
    parallelism: int | None = None,
    t_end: float = CYCLE_T_END,
) -> list[BifurcationRecord]:
    """
    Equilibria and limit-cycle detection over the (gamma, c2) grid.

    Points run concurrently; records come back in grid order (gamma outer,
    c2 inner). A point that fails is recorded with its error and the scan
    continues.
    """
    grid = [{"gamma": float(g), "c2": float(c)} for g, c in itertools.product(gamma_values, c2_values)]
    return scan_grid(p, grid, parallelism, t_end)


def scan_grid(
    p: ValidatedParams,
    grid: Sequence[dict[str, float]],
    parallelism: int | None = None,
    t_end: float = CYCLE_T_END,
) -> list[BifurcationRecord]:
    parallelism = parallelism or RuntimeConfig().parallelism
    logger.info(f"bifurcation scan over {len(grid)} point(s), parallelism={parallelism}")
    results = run_parallel(lambda point: scan_point(p, point, t_end), grid, parallelism)
    records = []
    for point, r in zip(grid, results):
        if not isinstance(r, BifurcationRecord):
            r = BifurcationRecord(
                gamma=float(point.get("gamma", p.gamma)),
                c2=float(point.get("c2", p.c2)),
                error=f"{type(r).__name__}: {r}",
            )
        records.append(r)
    return records
