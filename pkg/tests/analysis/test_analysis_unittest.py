import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from dynamic_solow.analysis import (
    asymptotic_report,
    block_cycle_durations,
    crossing_sampled_slope,
    cycle_durations,
    detrend,
    duration_histogram,
    fourier_lowpass,
    growth_rate,
    mean_sentiment,
    regime_fraction,
    upward_crossings,
)
from dynamic_solow.exceptions import (
    InsufficientCrossings,
    InvalidSimConfig,
    NonUniformSampling,
    WindowTooSmall,
    WrongMode,
)
from dynamic_solow.integrator import Trajectory
from dynamic_solow.params import InitialState, SimConfig, ValidatedParams, derived_quantities
from dynamic_solow.policies import DAYS_PER_YEAR


def _trajectory(k_s, k_d, mode="general", s=None):
    n = len(k_s)
    t = np.arange(n, dtype=float) * 25.0
    columns = {
        "t": t,
        "y": np.zeros(n),
        "k_s": np.asarray(k_s, dtype=float),
        "k_d": np.asarray(k_d, dtype=float),
        "k": np.minimum(k_s, k_d).astype(float),
        "s": np.zeros(n) if s is None else np.asarray(s, dtype=float),
        "h": np.zeros(n),
        "xi": np.zeros(n),
    }
    regime = (columns["k_d"] <= columns["k_s"]).astype(np.int8)
    cfg = SimConfig(t_end=max(t[-1], 25.0), regime_mode=mode)
    return Trajectory(columns=columns, params=ValidatedParams(), config=cfg, regime=regime)


class GrowthRateTests(unittest.TestCase):
    def test_recovers_linear_slope(self):
        t = np.arange(0.0, 10_000.0, 10.0)
        est = growth_rate(t, 1.0 + 3.75e-5 * t, variable="y")
        self.assertAlmostEqual(est.slope / 3.75e-5, 1.0, delta=1e-9)
        self.assertEqual(est.variable, "y")
        self.assertEqual(est.window, (t[0] + 0.5 * (t[-1] - t[0]), t[-1]))
        self.assertLess(est.residual_rms, 1e-12)

    def test_window_too_small(self):
        t = np.arange(50.0)
        with self.assertRaises(WindowTooSmall):
            growth_rate(t, t)
        with self.assertRaises(WindowTooSmall):
            growth_rate(np.arange(1000.0), np.arange(1000.0), window=(0.0, 10.0))


class DetrendTests(unittest.TestCase):
    def test_removes_line_and_keeps_orthogonal_oscillation(self):
        t = np.arange(5000) + 0.5
        wave = np.cos(2 * np.pi * t / 1000.0)
        np.testing.assert_allclose(detrend(t, 2.0 + 3e-4 * t + wave), wave, atol=1e-9)
        np.testing.assert_allclose(detrend(t, 2.0 + 3e-4 * t), 0.0, atol=1e-9)

    def test_idempotent_with_zero_mean(self):
        rng = np.random.default_rng(4)
        t = np.arange(2000.0)
        x = np.cumsum(rng.standard_normal(t.size))
        r = detrend(t, x)
        self.assertAlmostEqual(float(r.mean()), 0.0, delta=1e-9)
        np.testing.assert_allclose(detrend(t, r), r, atol=1e-9)


class CycleDurationTests(unittest.TestCase):
    def test_sine_durations_equal_period(self):
        t = np.arange(0.0, 10_000.0)
        durations = cycle_durations(t, np.sin(2 * np.pi * t / 250.0))
        self.assertGreaterEqual(durations.size, 35)
        np.testing.assert_allclose(durations, 250.0, atol=1e-6)

    def test_crossings_are_interpolated(self):
        t = np.array([0.0, 1.0, 2.0, 3.0])
        x = np.array([-1.0, 3.0, -2.0, 2.0])
        np.testing.assert_allclose(upward_crossings(t, x), [0.25, 2.5])

    def test_single_sign_series(self):
        t = np.arange(100.0)
        with self.assertRaises(InsufficientCrossings):
            cycle_durations(t, np.ones_like(t))


class BlockDetrendTests(unittest.TestCase):
    t = np.arange(0.0, 200_000.0, 5.0)
    # Ten-year cycle riding on a trend that turns once, at a block boundary
    x = np.sin(2 * np.pi * t / 2500.0) + 1e-4 * np.abs(t - 100_000.0)

    def test_block_detrending_recovers_cycle(self):
        durations = block_cycle_durations(self.t, self.x, 25_000.0)
        self.assertGreaterEqual(durations.size, 60)
        np.testing.assert_allclose(durations, 2500.0, rtol=0.01)

    def test_single_line_merges_cycles(self):
        durations = cycle_durations(self.t, detrend(self.t, self.x))
        self.assertGreater(durations.max(), 25_000.0)

    def test_monotone_series(self):
        with self.assertRaises(InsufficientCrossings):
            block_cycle_durations(self.t, 1e-4 * self.t, 25_000.0)

    def test_too_few_samples(self):
        with self.assertRaises(WindowTooSmall):
            block_cycle_durations(self.t[:50], self.x[:50], 25_000.0)


class CrossingSampledSlopeTests(unittest.TestCase):
    def test_cycle_in_phase_with_sampling_drops_out(self):
        t = np.arange(0.0, 100_000.0, 5.0)
        phase = np.sin(2 * np.pi * t / 5000.0)
        x = 3.0 * phase + 2e-5 * t
        self.assertAlmostEqual(crossing_sampled_slope(t, x, phase), 2e-5, delta=1e-12)
        self.assertGreater(abs(growth_rate(t, x).slope - 2e-5), 1e-6)

    def test_needs_two_crossings(self):
        t = np.arange(1000.0)
        with self.assertRaises(InsufficientCrossings):
            crossing_sampled_slope(t, t, np.sin(2 * np.pi * t / 1500.0))


class HistogramTests(unittest.TestCase):
    def test_point_mass(self):
        hist = duration_histogram(np.full(12, 50.0 * DAYS_PER_YEAR))
        self.assertEqual(hist.edges_years[0], 10.0)
        self.assertEqual(hist.edges_years[-1], 150.0)
        self.assertEqual(hist.counts[8], 12)
        self.assertEqual(hist.modal_bin, (50.0, 55.0))
        self.assertEqual(hist.band_fraction, 1.0)
        self.assertEqual((hist.total, hist.n_binned), (12, 12))

    def test_out_of_range_counts_only_in_total(self):
        years = np.array([5.0, 200.0, 150.0, 12.0])
        hist = duration_histogram(years * DAYS_PER_YEAR)
        self.assertEqual(hist.total, 4)
        self.assertEqual(hist.n_binned, 2)
        self.assertEqual(hist.counts[-1], 1)
        self.assertEqual(hist.counts[0], 1)
        self.assertEqual(hist.band_fraction, 0.0)

    def test_empty(self):
        hist = duration_histogram(np.array([]))
        self.assertIsNone(hist.modal_bin)
        self.assertEqual(hist.total, 0)


class RegimeFractionTests(unittest.TestCase):
    def test_always_demand_limited(self):
        self.assertEqual(regime_fraction(_trajectory([2.0] * 10, [1.0] * 10)), 1.0)

    def test_half_and_half(self):
        self.assertEqual(regime_fraction(_trajectory([2.0] * 10, [1.0] * 5 + [3.0] * 5)), 0.5)

    def test_forced_mode_rejected(self):
        with self.assertRaises(WrongMode):
            regime_fraction(_trajectory([2.0] * 10, [1.0] * 10, mode="forced_supply"))


class MeanSentimentTests(unittest.TestCase):
    def test_window_average(self):
        s = np.concatenate([np.full(100, -0.5), np.full(200, 0.25)])
        traj = _trajectory(np.ones(300), np.ones(300), s=s)
        self.assertAlmostEqual(mean_sentiment(traj, burn_in=2500.0), 0.25, delta=1e-15)

    def test_too_few_samples(self):
        traj = _trajectory(np.ones(50), np.ones(50))
        with self.assertRaises(WindowTooSmall):
            mean_sentiment(traj)


class LowpassTests(unittest.TestCase):
    t = np.arange(5000) + 0.5

    def test_constant_is_unchanged(self):
        np.testing.assert_allclose(fourier_lowpass(self.t, np.full(self.t.size, 3.0), 500.0), 3.0, atol=1e-12)

    def test_short_periods_removed(self):
        fast = np.cos(2 * np.pi * self.t / 100.0)
        slow = np.cos(2 * np.pi * self.t / 1000.0)
        filtered = fourier_lowpass(self.t, fast, 500.0)
        self.assertLess(np.sqrt(np.mean(filtered**2)), 0.01 * np.sqrt(np.mean(fast**2)))
        np.testing.assert_allclose(fourier_lowpass(self.t, fast + slow, 500.0), slow, atol=1e-9)

    def test_non_uniform_sampling(self):
        t = self.t.copy()
        t[10] += 0.3
        with self.assertRaises(NonUniformSampling):
            fourier_lowpass(t, np.zeros(t.size), 500.0)


class AsymptoticReportTests(unittest.TestCase):
    def test_supply_relation_on_balanced_start(self):
        p = ValidatedParams()
        report = asymptotic_report(p, "forced_supply", 400, seed=1, noise=False, initial=InitialState.balanced(p))
        R = derived_quantities(p).R
        self.assertEqual(report.relation, "supply")
        self.assertEqual(report.R, R)
        self.assertLess(abs(report.relation_residual), 0.02 * R)
        self.assertAlmostEqual(report.implied_kd0, p.c2 * report.mean_sentiment, delta=1e-18)

    def test_short_horizon_rejected(self):
        with self.assertRaises(InvalidSimConfig):
            asymptotic_report(ValidatedParams(), "general", 100, seed=0)

    def test_fit_window_must_start_inside_run(self):
        for fit_from in (1.0, -0.1):
            with self.assertRaises(InvalidSimConfig):
                asymptotic_report(ValidatedParams(), "general", 400, seed=0, fit_from=fit_from)

    def test_fit_window_follows_fit_from(self):
        p = ValidatedParams()
        report = asymptotic_report(p, "forced_supply", 400, seed=1, noise=False, fit_from=0.25,
                                   initial=InitialState.balanced(p))
        self.assertEqual(report.window, (25_000.0, 100_000.0))


@given(a=st.floats(-5, 5), b=st.floats(-5, 5), seed=st.integers(0, 1000))
@settings(max_examples=25, deadline=None)
def test_lowpass_is_linear(a, b, seed):
    rng = np.random.default_rng(seed)
    t = np.arange(512.0)
    x, y = rng.standard_normal((2, t.size))
    combined = fourier_lowpass(t, a * x + b * y, 50.0)
    separate = a * fourier_lowpass(t, x, 50.0) + b * fourier_lowpass(t, y, 50.0)
    np.testing.assert_allclose(combined, separate, atol=1e-10)


if __name__ == "__main__":
    unittest.main()
