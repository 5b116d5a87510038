"""
News noise and the agent-level sentiment oracle.

The news process is an Ornstein-Uhlenbeck process advanced with its exact
discrete map. The micro ensemble simulates individual managers flipping
between optimism and pessimism; its mean follows the macro sentiment
equation when the peer force is constant.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter
from scipy.special import expit

from .exceptions import StepTooLarge
from .policies import MICRO_ALPHA

logger = logging.getLogger(__name__)


def noise_streams(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    """Disjoint generators for the news noise and the micro ensemble, derived from one seed."""
    noise_seq, micro_seq = np.random.SeedSequence(seed).spawn(2)
    return np.random.Generator(np.random.PCG64(noise_seq)), np.random.Generator(np.random.PCG64(micro_seq))


def ou_coefficients(dt: float, tau: float, sigma: float) -> tuple[float, float]:
    """(decay, diffusion) of the exact OU map xi' = decay * xi + diffusion * eta."""
    decay = math.exp(-dt / tau)
    return decay, sigma * math.sqrt(-math.expm1(-2.0 * dt / tau))


@dataclass
class NoiseProcess:
    """
    News noise xi with stationary law N(0, sigma^2) and correlation time tau_xi.

    One instance belongs to one simulation worker; the generator advances
    with every draw.
    """

    value: float
    tau_xi: float
    sigma: float
    rng: np.random.Generator = field(repr=False)

    @classmethod
    def from_seed(cls, seed: int, tau_xi: float, sigma: float, value: float = 0.0) -> "NoiseProcess":
        rng, _ = noise_streams(seed)
        return cls(value=value, tau_xi=tau_xi, sigma=sigma, rng=rng)

    def path(self, n: int, dt: float) -> np.ndarray:
        """Advance n steps at once; returns the n new values and keeps the last."""
        decay, diffusion = ou_coefficients(dt, self.tau_xi, self.sigma)
        eta = self.rng.standard_normal(n)
        out, _ = lfilter([diffusion], [1.0, -decay], eta, zi=[decay * self.value])
        if n:
            self.value = float(out[-1])
        return out


def ou_step(proc: NoiseProcess, dt: float) -> float:
    decay, diffusion = ou_coefficients(dt, proc.tau_xi, proc.sigma)
    proc.value = proc.value * decay + diffusion * proc.rng.standard_normal()
    return proc.value


def autocorrelation(x: np.ndarray, max_lag: int) -> np.ndarray:
    """Sample autocorrelation at lags 0..max_lag."""
    x = np.asarray(x, dtype=float) - np.mean(x)
    var = np.dot(x, x) / x.size
    return np.array([np.dot(x[: x.size - k], x[k:]) / (x.size * var) for k in range(max_lag + 1)])


# ============================================================================
# Micro ensemble
# ============================================================================


def micro_transition_rates(F_s: float, tau: float, alpha: float = MICRO_ALPHA) -> tuple[float, float]:
    """
    Per-day flip rates (pessimist->optimist, optimist->pessimist).

    The two rates always sum to 1/tau.
    """
    return float(expit(alpha * F_s)) / tau, float(expit(-alpha * F_s)) / tau


@dataclass(frozen=True)
class MicroEnsemble:
    tau: float
    states: np.ndarray = field(repr=False)

    @property
    def N(self) -> int:
        return int(self.states.size)

    @property
    def s(self) -> float:
        """Aggregate sentiment (N+ - N-) / N."""
        return float(np.mean(self.states, dtype=np.float64))

    @classmethod
    def with_sentiment(cls, N: int, tau: float, s0: float, rng: np.random.Generator) -> "MicroEnsemble":
        """N agents with a random (1 + s0)/2 share of optimists."""
        n_plus = int(round(N * (1.0 + s0) / 2.0))
        states = np.full(N, -1, dtype=np.int8)
        states[:n_plus] = 1
        rng.shuffle(states)
        return cls(tau=tau, states=states)


def micro_ensemble_step(
    ens: MicroEnsemble, F_s: float, dt: float, rng: np.random.Generator, alpha: float = MICRO_ALPHA
) -> MicroEnsemble:
    up, down = micro_transition_rates(F_s, ens.tau, alpha)
    if dt * max(up, down) >= 1.0:
        raise StepTooLarge(f"dt={dt} with flip rate {max(up, down):.4g}/day gives probability >= 1")
    rate = np.where(ens.states > 0, down, up)
    flip = rng.random(ens.N) < rate * dt
    return MicroEnsemble(tau=ens.tau, states=np.where(flip, -ens.states, ens.states).astype(np.int8))


def run_micro_ensemble(
    ens: MicroEnsemble, forces, dt: float, rng: np.random.Generator, alpha: float = MICRO_ALPHA
) -> np.ndarray:
    """Aggregate sentiment before the first step and after each step of the force schedule."""
    forces = np.atleast_1d(np.asarray(forces, dtype=float))
    out = np.empty(forces.size + 1)
    out[0] = ens.s
    for i, F_s in enumerate(forces):
        ens = micro_ensemble_step(ens, F_s, dt, rng, alpha)
        out[i + 1] = ens.s
    logger.debug(f"micro ensemble N={ens.N} ran {forces.size} steps, final s={out[-1]:.4f}")
    return out


def mean_field_path(s0: float, forces, dt: float, tau: float, alpha: float = MICRO_ALPHA) -> np.ndarray:
    """
    Deterministic counterpart of ``run_micro_ensemble``.

    Integrates tau s' = -s + tanh(alpha F / 2) with the same step, which is
    the exact expectation of the agent update.
    """
    forces = np.atleast_1d(np.asarray(forces, dtype=float))
    out = np.empty(forces.size + 1)
    out[0] = s0
    for i, F_s in enumerate(forces):
        out[i + 1] = out[i] + dt * (-out[i] + math.tanh(alpha * F_s / 2.0)) / tau
    return out
