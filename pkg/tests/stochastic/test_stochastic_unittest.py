"""
Tests for the news noise process and the agent-level sentiment oracle.
"""

import math
import unittest

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from dynamic_solow.exceptions import StepTooLarge
from dynamic_solow.orchestrator import run_parallel
from dynamic_solow.stochastic import (
    MicroEnsemble,
    NoiseProcess,
    autocorrelation,
    mean_field_path,
    micro_ensemble_step,
    micro_transition_rates,
    noise_streams,
    ou_coefficients,
    ou_step,
    run_micro_ensemble,
)


class NoiseProcessTests(unittest.TestCase):
    def test_zero_amplitude_is_pure_decay(self):
        proc = NoiseProcess.from_seed(1, tau_xi=5.0, sigma=0.0, value=1.0)
        self.assertAlmostEqual(ou_step(proc, 1.0), math.exp(-0.2), delta=1e-15)
        path = proc.path(10, 1.0)
        np.testing.assert_allclose(path, np.exp(-0.2 * np.arange(2, 12)), rtol=1e-12)

    def test_exact_map_coefficients(self):
        decay, diffusion = ou_coefficients(1.0, 5.0, 2.0)
        self.assertAlmostEqual(decay, math.exp(-0.2), delta=1e-15)
        self.assertAlmostEqual(diffusion**2, 4.0 * (1.0 - math.exp(-0.4)), delta=1e-14)

    def test_one_step_moments(self):
        proc = NoiseProcess.from_seed(11, tau_xi=5.0, sigma=1.0)
        draws = np.empty(100_000)
        for i in range(draws.size):
            proc.value = 0.5
            draws[i] = ou_step(proc, 1.0)
        self.assertAlmostEqual(draws.mean(), 0.5 * math.exp(-0.2), delta=0.01)
        self.assertAlmostEqual(draws.var() / (1.0 - math.exp(-0.4)), 1.0, delta=0.03)

    def test_stationary_std_and_autocorrelation(self):
        proc = NoiseProcess.from_seed(5, tau_xi=5.0, sigma=1.0)
        xi = proc.path(1_000_000, 1.0)
        self.assertAlmostEqual(xi.std(), 1.0, delta=0.01)
        acf = autocorrelation(xi, 15)
        np.testing.assert_allclose(acf, np.exp(-np.arange(16) / 5.0), atol=0.05)

    def test_path_in_pieces_matches_single_call(self):
        whole = NoiseProcess.from_seed(9, tau_xi=5.0, sigma=1.0).path(1000, 1.0)
        proc = NoiseProcess.from_seed(9, tau_xi=5.0, sigma=1.0)
        pieces = np.concatenate([proc.path(300, 1.0), proc.path(700, 1.0)])
        np.testing.assert_allclose(pieces, whole, rtol=1e-12, atol=1e-14)

    def test_same_seed_same_path_across_threads(self):
        def path(seed):
            return NoiseProcess.from_seed(seed, tau_xi=5.0, sigma=1.0).path(2000, 1.0)

        serial = [path(s) for s in (1, 2, 3)]
        threaded = run_parallel(path, [1, 2, 3], parallelism=3)
        for a, b in zip(serial, threaded):
            np.testing.assert_array_equal(a, b)
        self.assertFalse(np.array_equal(serial[0], serial[1]))

    def test_streams_are_disjoint(self):
        noise, micro = noise_streams(0)
        self.assertNotEqual(noise.standard_normal(), micro.standard_normal())


class TransitionRateTests(unittest.TestCase):
    def test_no_force_is_symmetric(self):
        up, down = micro_transition_rates(0.0, 250.0)
        self.assertEqual(up, down)
        self.assertAlmostEqual(up, 1.0 / 500.0, delta=1e-18)

    def test_positive_force_favours_optimism(self):
        up, down = micro_transition_rates(0.3, 250.0)
        self.assertGreater(up, down)

    @given(F=st.floats(-20.0, 20.0), tau=st.floats(1.0, 1000.0))
    def test_rates_sum_to_inverse_timescale(self, F, tau):
        up, down = micro_transition_rates(F, tau)
        self.assertAlmostEqual((up + down) * tau, 1.0, delta=1e-12)


class MicroEnsembleTests(unittest.TestCase):
    def test_with_sentiment_sets_optimist_share(self):
        ens = MicroEnsemble.with_sentiment(1000, 25.0, 0.5, np.random.default_rng(0))
        self.assertEqual(ens.N, 1000)
        self.assertEqual(ens.s, 0.5)
        self.assertEqual(ens.states.dtype, np.int8)

    def test_step_too_large(self):
        ens = MicroEnsemble.with_sentiment(10, 1.0, 0.0, np.random.default_rng(0))
        with self.assertRaises(StepTooLarge):
            micro_ensemble_step(ens, 0.0, 2.0, np.random.default_rng(0))

    def test_stationary_mean(self):
        F = 0.3
        _, rng = noise_streams(21)
        ens = MicroEnsemble.with_sentiment(20_000, 20.0, 0.0, rng)
        path = run_micro_ensemble(ens, np.full(400, F), 1.0, rng)
        self.assertAlmostEqual(path[200:].mean(), math.tanh(F), delta=0.01)

    def test_tracks_mean_field_and_improves_with_size(self):
        forces = np.full(250, 0.3)
        expected = mean_field_path(0.0, forces, 1.0, 25.0)
        deviation = {}
        for N in (1_000, 100_000):
            _, rng = noise_streams(N)
            ens = MicroEnsemble.with_sentiment(N, 25.0, 0.0, rng)
            deviation[N] = np.max(np.abs(run_micro_ensemble(ens, forces, 1.0, rng) - expected))
        self.assertLess(deviation[100_000], 0.02)
        self.assertLess(deviation[100_000], deviation[1_000])


if __name__ == "__main__":
    unittest.main()
