"""
Statistics extracted from trajectories: growth rates, detrending, cycle
durations and their histogram, regime fraction, average sentiment, and the
display low-pass filter.
"""

from __future__ import annotations

import logging
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import fft

from .config import RuntimeConfig
from .exceptions import InsufficientCrossings, InvalidSimConfig, NonUniformSampling, WindowTooSmall, WrongMode
from .integrator import Trajectory, simulate
from .params import InitialState, SimConfig, ValidatedParams, derived_quantities
from .policies import (
    DAYS_PER_YEAR,
    DEFAULT_RECORD_STRIDE,
    HIST_BAND_YEARS,
    HIST_BIN_YEARS,
    HIST_RANGE_YEARS,
    MIN_WINDOW_SAMPLES,
    UNIFORM_TOL,
)

logger = logging.getLogger(__name__)


class GrowthEstimate(BaseModel):
    model_config = ConfigDict(frozen=True)

    variable: str
    slope: float  # per day
    intercept: float
    window: tuple[float, float]  # days
    residual_rms: float
    n_samples: int


class DurationHistogram(BaseModel):
    model_config = ConfigDict(frozen=True)

    edges_years: tuple[float, ...]
    counts: tuple[int, ...]
    total: int  # every duration, binned or not
    n_binned: int
    modal_bin: tuple[float, float] | None
    band_fraction: float  # share of binned durations in the 40-70 year band


class AsymptoticReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    mode: str
    horizon_years: float
    seed: int
    window: tuple[float, float]
    R: float
    y0: float
    ks0: float
    kd0: float
    relation: Literal["supply", "demand", "balanced"]
    relation_residual: float
    ks_gap: float  # y0 - ks0
    fitted_vs_R: float  # y0 - R
    mean_sentiment: float
    implied_kd0: float  # c2 * mean sentiment


def _fit_line(t: np.ndarray, x: np.ndarray) -> tuple[float, float]:
    # Centered time keeps the normal equations well conditioned over long horizons
    t_mid = 0.5 * (t[0] + t[-1])
    A = np.column_stack([t - t_mid, np.ones_like(t)])
    (slope, level), *_ = np.linalg.lstsq(A, x, rcond=None)
    return float(slope), float(level - slope * t_mid)


def growth_rate(
    t: np.ndarray, x: np.ndarray, window: tuple[float, float] | None = None, variable: str = "series"
) -> GrowthEstimate:
    """
    OLS slope of ``x`` against ``t`` over ``window`` (default: last half of the series).

    Raises:
        WindowTooSmall: if fewer than 100 samples fall in the window
    """
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    if window is None:
        window = (t[0] + 0.5 * (t[-1] - t[0]), t[-1]) if t.size else (0.0, 0.0)
    mask = (t >= window[0]) & (t <= window[1])
    n = int(mask.sum())
    if n < MIN_WINDOW_SAMPLES:
        raise WindowTooSmall(f"{variable}: {n} samples in window {window}, need {MIN_WINDOW_SAMPLES}")
    slope, intercept = _fit_line(t[mask], x[mask])
    resid = x[mask] - (slope * t[mask] + intercept)
    return GrowthEstimate(
        variable=variable,
        slope=slope,
        intercept=intercept,
        window=(float(window[0]), float(window[1])),
        residual_rms=float(np.sqrt(np.mean(resid**2))),
        n_samples=n,
    )


def detrend(t: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Residuals about the full-sample OLS line."""
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    if t.size < MIN_WINDOW_SAMPLES:
        raise WindowTooSmall(f"detrend needs {MIN_WINDOW_SAMPLES} samples, got {t.size}")
    slope, intercept = _fit_line(t, x)
    return x - (slope * t + intercept)


def upward_crossings(t: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Linearly interpolated times where x goes from negative to non-negative."""
    idx = np.flatnonzero((x[:-1] < 0) & (x[1:] >= 0))
    frac = -x[idx] / (x[idx + 1] - x[idx])
    return t[idx] + frac * (t[idx + 1] - t[idx])


def cycle_durations(t: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Days between consecutive upward zero crossings."""
    crossings = upward_crossings(np.asarray(t, dtype=float), np.asarray(x, dtype=float))
    if crossings.size < 2:
        raise InsufficientCrossings(f"need 2 upward zero crossings, found {crossings.size}")
    return np.diff(crossings)


def block_cycle_durations(t: np.ndarray, x: np.ndarray, block: float) -> np.ndarray:
    """
    Cycle durations of ``x`` detrended block by block.

    Each consecutive block of ``block`` days is detrended about its own OLS
    line; only crossings inside the same block pair up into a duration.
    Blocks with fewer than two upward crossings contribute nothing.
    """
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    if t.size < MIN_WINDOW_SAMPLES:
        raise WindowTooSmall(f"block detrending needs {MIN_WINDOW_SAMPLES} samples, got {t.size}")
    index = np.floor((t - t[0]) / block).astype(np.int64)
    out = []
    for b in np.unique(index):
        mask = index == b
        if mask.sum() < MIN_WINDOW_SAMPLES:
            continue
        crossings = upward_crossings(t[mask], detrend(t[mask], x[mask]))
        if crossings.size >= 2:
            out.append(np.diff(crossings))
    durations = np.concatenate(out) if out else np.empty(0)
    if durations.size == 0:
        raise InsufficientCrossings(f"no block of {block:g} days holds 2 upward zero crossings")
    return durations


def crossing_sampled_slope(t: np.ndarray, x: np.ndarray, phase: np.ndarray) -> float:
    """
    Slope of ``x`` sampled at the upward zero crossings of ``phase``.

    Sampling once per cycle at the same phase drops any part of ``x`` that
    moves in step with ``phase`` itself; what is left is the drift per cycle.
    """
    t = np.asarray(t, dtype=float)
    crossings = upward_crossings(t, np.asarray(phase, dtype=float))
    if crossings.size < 2:
        raise InsufficientCrossings(f"need 2 upward zero crossings, found {crossings.size}")
    samples = np.interp(crossings, t, np.asarray(x, dtype=float))
    slope, _ = _fit_line(crossings, samples)
    return slope


def duration_histogram(durations: np.ndarray) -> DurationHistogram:
    """5-year bins over [10, 150] years; durations outside the range count only toward ``total``."""
    years = np.asarray(durations, dtype=float) / DAYS_PER_YEAR
    lo, hi = HIST_RANGE_YEARS
    edges = np.arange(lo, hi + HIST_BIN_YEARS / 2, HIST_BIN_YEARS)
    in_range = (years >= lo) & (years <= hi)
    counts, _ = np.histogram(years[in_range], bins=edges)
    n_binned = int(counts.sum())

    modal = None
    band_fraction = 0.0
    if n_binned:
        i = int(np.argmax(counts))
        modal = (float(edges[i]), float(edges[i + 1]))
        band = (edges[:-1] >= HIST_BAND_YEARS[0]) & (edges[1:] <= HIST_BAND_YEARS[1])
        band_fraction = float(counts[band].sum() / n_binned)
    return DurationHistogram(
        edges_years=tuple(float(e) for e in edges),
        counts=tuple(int(c) for c in counts),
        total=int(years.size),
        n_binned=n_binned,
        modal_bin=modal,
        band_fraction=band_fraction,
    )


def regime_fraction(traj: Trajectory) -> float:
    """Share of recorded samples with k_d <= k_s in a general-mode run."""
    if traj.reduced or traj.mode != "general":
        raise WrongMode(f"regime fraction needs a general-mode trajectory, got {traj.mode}")
    if len(traj) == 0:
        raise WindowTooSmall("trajectory has no samples")
    return float(np.mean(traj.regime))


def mean_sentiment(traj: Trajectory, burn_in: float = 0.0) -> float:
    s = traj["s"][traj.t >= burn_in]
    if s.size < MIN_WINDOW_SAMPLES:
        raise WindowTooSmall(f"{s.size} sentiment samples after t={burn_in:g}, need {MIN_WINDOW_SAMPLES}")
    return float(np.mean(s))


def fourier_lowpass(t: np.ndarray, x: np.ndarray, cutoff_period: float) -> np.ndarray:
    """
    Remove Fourier components with period shorter than ``cutoff_period`` days.

    The series is mirrored to twice its length before the transform so the
    ends do not wrap into each other; the mirror is dropped afterwards.
    """
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    n = x.size
    if n < 2:
        return x.copy()
    steps = np.diff(t)
    dt = steps[0]
    if dt <= 0 or np.max(np.abs(steps - dt)) > UNIFORM_TOL * abs(dt):
        raise NonUniformSampling("fourier_lowpass needs uniformly spaced samples")

    padded = np.concatenate([x, x[::-1]])
    spectrum = fft.rfft(padded)
    freqs = fft.rfftfreq(padded.size, d=dt)
    spectrum[freqs > 1.0 / cutoff_period] = 0.0
    return fft.irfft(spectrum, n=padded.size)[:n]


def asymptotic_report(
    p: ValidatedParams,
    mode: str,
    horizon_years: float,
    seed: int,
    noise: bool = True,
    initial: InitialState | None = None,
    fit_from: float = 0.5,
    runtime: RuntimeConfig | None = None,
) -> AsymptoticReport:
    """
    Long-run growth rates of y, k_s, k_d fitted from ``fit_from`` of the
    horizon to its end (default: the last half), and the residual of the
    growth relation that applies to ``mode``.

    Supply mode checks y0 = R (and k_d0 = 0), demand mode checks
    y0 = R + rho*(k_d0 - R), general mode checks y0 = R.
    """
    if horizon_years < 200:
        raise InvalidSimConfig("horizon_years", horizon_years, "asymptotic report needs >= 200 years")
    if not 0 <= fit_from < 1:
        raise InvalidSimConfig("fit_from", fit_from, "fit window must start inside the run")
    q = p if noise else p.with_overrides(sigma_xi=0.0)
    cfg = SimConfig(
        t_end=horizon_years * DAYS_PER_YEAR,
        record_stride=DEFAULT_RECORD_STRIDE,
        regime_mode=mode,
        seed=seed,
        initial=initial or InitialState(),
    )
    traj = simulate(q, cfg, runtime)
    R = derived_quantities(q).R
    window = (fit_from * cfg.t_end, cfg.t_end)
    y0 = growth_rate(traj.t, traj["y"], window, "y").slope
    ks0 = growth_rate(traj.t, traj["k_s"], window, "k_s").slope
    kd0 = growth_rate(traj.t, traj["k_d"], window, "k_d").slope
    s_bar = mean_sentiment(traj, window[0])

    if mode == "forced_supply":
        relation, residual = "supply", y0 - R
    elif mode == "forced_demand":
        relation, residual = "demand", y0 - (R + q.rho * (kd0 - R))
    else:
        relation, residual = "balanced", y0 - R

    report = AsymptoticReport(
        mode=mode,
        horizon_years=horizon_years,
        seed=seed,
        window=window,
        R=R,
        y0=y0,
        ks0=ks0,
        kd0=kd0,
        relation=relation,
        relation_residual=residual,
        ks_gap=y0 - ks0,
        fitted_vs_R=y0 - R,
        mean_sentiment=s_bar,
        implied_kd0=q.c2 * s_bar,
    )
    logger.info(f"asymptotic report mode={mode} seed={seed}: y0={y0:.4e} ks0={ks0:.4e} kd0={kd0:.4e} R={R:.4e}")
    return report
