from __future__ import annotations

import logging
from typing import Callable, Sequence, TypeVar

import numpy as np

from ..config import RuntimeConfig
from ..dynamics import ReducedState, jacobian_reduced, rhs_reduced
from ..integrator import Trajectory, simulate
from ..orchestrator import derive_seed, run_parallel
from ..params import InitialState, SimConfig, ValidatedParams
from ..policies import DAYS_PER_YEAR, ENSEMBLE_SEEDS, SCENARIO_SEED


logger = logging.getLogger(__name__)

T = TypeVar("T")


def ensemble_seeds(n: int = ENSEMBLE_SEEDS) -> list[int]:
    return [derive_seed(SCENARIO_SEED, i) for i in range(n)]


def map_seeds(fn: Callable[[int], T], seeds: Sequence[int], runtime: RuntimeConfig) -> list[T]:
    """Run ``fn`` per seed concurrently; the first failure is re-raised."""
    results = run_parallel(fn, seeds, runtime.parallelism)
    for r in results:
        if isinstance(r, BaseException):
            raise r
    return results


def balanced_config(p: ValidatedParams, mode: str, years: float, seed: int = SCENARIO_SEED, **kw) -> SimConfig:
    return SimConfig(
        t_end=years * DAYS_PER_YEAR,
        regime_mode=mode,
        seed=seed,
        initial=InitialState.balanced(p, s0=kw.pop("s0", 0.0)),
        **kw,
    )


# General-mode output only settles onto R once the slow supply/demand
# excursions have averaged out; a few thousand years leave a +-30% spread per seed
GENERAL_HORIZON_YEARS = 50_000
GENERAL_RECORD_STRIDE = 250


def general_ensemble(
    p: ValidatedParams, runtime: RuntimeConfig, years: float = GENERAL_HORIZON_YEARS, n_seeds: int = ENSEMBLE_SEEDS
) -> list[Trajectory]:
    """Base-case general-mode runs shared by the growth and regime-fraction scenarios, one sample per year."""
    return map_seeds(
        lambda seed: simulate(p, balanced_config(p, "general", years, seed, record_stride=GENERAL_RECORD_STRIDE), runtime),
        ensemble_seeds(n_seeds),
        runtime,
    )


def jacobian_check(p: ValidatedParams, n_states: int = 1000, step: float = 1e-6, seed: int = SCENARIO_SEED) -> float:
    """
    Worst max-norm relative error between the analytic Jacobian and central
    differences over random states with |s|, |h| <= 0.9 and |z| <= 1.
    """
    rng = np.random.default_rng(seed)
    states = rng.uniform([-0.9, -0.9, -1.0], [0.9, 0.9, 1.0], size=(n_states, 3))
    worst = 0.0
    for x in states:
        J = jacobian_reduced(ReducedState(*x), p)
        fd = np.empty((3, 3))
        for j in range(3):
            e = np.zeros(3)
            e[j] = step
            fd[:, j] = (
                rhs_reduced(ReducedState(*(x + e)), p).as_array()
                - rhs_reduced(ReducedState(*(x - e)), p).as_array()
            ) / (2 * step)
        worst = max(worst, float(np.max(np.abs(J - fd)) / np.max(np.abs(J))))
    return worst
