import unittest

import numpy as np

from dynamic_solow.analysis import growth_rate
from dynamic_solow.config import RuntimeConfig
from dynamic_solow.dynamics import analytic_supply_path
from dynamic_solow.exceptions import InvalidSimConfig, NonFiniteState
from dynamic_solow.integrator import REDUCED_COLUMNS, simulate, simulate_reduced, solve_supply_ode
from dynamic_solow.params import InitialState, SimConfig, ValidatedParams, derived_quantities
from dynamic_solow.policies import SUPPLY_CURVE_B, SUPPLY_CURVE_CASE

BASE = ValidatedParams()


class RecordingTests(unittest.TestCase):
    def test_samples_include_start_and_horizon(self):
        traj = simulate(BASE, SimConfig(t_end=1000.0, record_stride=25))
        self.assertEqual(len(traj), 41)
        self.assertEqual(traj.t[0], 0.0)
        self.assertEqual(traj.t[-1], 1000.0)
        np.testing.assert_allclose(np.diff(traj.t), traj.sample_spacing)

    def test_burn_in_drops_early_samples(self):
        traj = simulate(BASE, SimConfig(t_end=1000.0, record_stride=25, burn_in=100.0))
        self.assertEqual(len(traj), 37)
        self.assertEqual(traj.t[0], 100.0)

    def test_columns_are_read_only(self):
        traj = simulate(BASE, SimConfig(t_end=100.0, record_stride=10))
        with self.assertRaises(ValueError):
            traj["s"][0] = 1.0

    def test_regime_flag_matches_capital(self):
        traj = simulate(BASE, SimConfig(t_end=20_000.0, record_stride=10, seed=3))
        np.testing.assert_array_equal(traj.regime == 1, traj["k_d"] <= traj["k_s"])
        np.testing.assert_array_equal(traj["k"], np.minimum(traj["k_s"], traj["k_d"]))


class DeterminismTests(unittest.TestCase):
    def test_identical_inputs_give_identical_runs(self):
        cfg = SimConfig(t_end=20_000.0, record_stride=5, seed=17)
        a = simulate(BASE, cfg)
        b = simulate(BASE, cfg)
        for name in a.column_names:
            np.testing.assert_array_equal(a[name], b[name])

    def test_chunk_size_does_not_change_results(self):
        cfg = SimConfig(t_end=20_000.0, record_stride=5, seed=17)
        a = simulate(BASE, cfg, RuntimeConfig(chunk_steps=1000))
        b = simulate(BASE, cfg, RuntimeConfig(chunk_steps=1 << 18))
        np.testing.assert_array_equal(a["h"], b["h"])
        np.testing.assert_array_equal(a["y"], b["y"])

    def test_seed_changes_noise(self):
        a = simulate(BASE, SimConfig(t_end=1000.0, seed=1))
        b = simulate(BASE, SimConfig(t_end=1000.0, seed=2))
        self.assertFalse(np.array_equal(a["xi"], b["xi"]))

    def test_mirrored_news_negates_sentiment_without_feedback(self):
        start = InitialState.balanced(BASE).model_copy(update={"xi0": 0.3})
        cfg = SimConfig(t_end=20_000.0, record_stride=5, seed=17, regime_mode="forced_supply", initial=start)
        a = simulate(BASE, cfg)
        b = simulate(BASE, cfg.model_copy(update={"mirror_noise": True}))
        self.assertEqual(b["xi"][0], -0.3)
        for name in ("s", "h", "xi"):
            np.testing.assert_array_equal(b[name], -a[name])
        for name in ("y", "k_s"):
            np.testing.assert_array_equal(b[name], a[name])
        np.testing.assert_allclose(a["k_d"] + b["k_d"], 2 * start.kd0, atol=1e-9)


class FixedPointTests(unittest.TestCase):
    def test_reduced_origin_is_preserved_exactly(self):
        p = BASE.with_overrides(epsilon=0.0)
        traj = simulate(p, SimConfig(t_end=10_000.0, regime_mode="reduced_deterministic"))
        self.assertEqual(traj.column_names, REDUCED_COLUMNS)
        for name in ("s", "h", "z"):
            self.assertTrue(np.all(traj[name] == 0.0))

    def test_forced_demand_rest_state_without_noise(self):
        p = BASE.with_overrides(epsilon=0.0, sigma_xi=0.0)
        traj = simulate(p, SimConfig(t_end=10_000.0, regime_mode="forced_demand"))
        for name in ("s", "h", "xi"):
            self.assertTrue(np.all(traj[name] == 0.0))
        self.assertTrue(np.all(traj["y"] == traj["y"][0]))
        self.assertTrue(np.all(traj["k_d"] == traj["k_d"][0]))


class ReducedSystemTests(unittest.TestCase):
    def test_matches_forced_demand_run(self):
        cfg = SimConfig(t_end=10_000.0, record_stride=10, regime_mode="forced_demand", seed=5,
                        initial=InitialState(s0=0.3, h0=-0.2))
        full = simulate(BASE, cfg)
        reduced = simulate_reduced(BASE, cfg, xi_on=True)
        z_full = BASE.rho * full["k_d"] + BASE.epsilon * full.t - full["y"]
        np.testing.assert_allclose(reduced["s"], full["s"], atol=1e-9)
        np.testing.assert_allclose(reduced["h"], full["h"], atol=1e-9)
        np.testing.assert_allclose(reduced["z"], z_full, atol=1e-9)

    def test_rejects_general_mode(self):
        with self.assertRaises(InvalidSimConfig):
            simulate_reduced(BASE, SimConfig(t_end=100.0))

    def test_forced_demand_stays_bounded(self):
        cfg = SimConfig(t_end=1_000_000.0, record_stride=100, regime_mode="forced_demand", seed=8)
        traj = simulate(BASE, cfg)
        z = BASE.rho * traj["k_d"] + BASE.epsilon * traj.t - traj["y"]
        self.assertLess(np.max(np.abs(traj["s"])), 1.0)
        self.assertLess(np.max(np.abs(traj["h"])), 1.0)
        self.assertLess(np.max(np.abs(z)), 10.0)


class DivergenceTests(unittest.TestCase):
    def test_exponent_clamp_reports_step(self):
        cfg = SimConfig(t_end=100.0, initial=InitialState(y0=-100.0))
        with self.assertRaises(NonFiniteState) as ctx:
            simulate(BASE, cfg)
        self.assertEqual(ctx.exception.step, 0)


class SupplyRegimeTests(unittest.TestCase):
    def test_output_grows_at_technology_rate_and_is_step_insensitive(self):
        R = derived_quantities(BASE).R
        cfg = SimConfig(t_end=100_000.0, record_stride=25, regime_mode="forced_supply",
                        initial=InitialState.balanced(BASE))
        coarse = simulate(BASE, cfg)
        fine = simulate(BASE, SimConfig(**{**cfg.model_dump(), "dt": 0.5, "record_stride": 50, "noise_hold": 2}))
        window = (50_000.0, 100_000.0)
        slope = growth_rate(coarse.t, coarse["y"], window).slope
        self.assertAlmostEqual(slope / R, 1.0, delta=0.02)
        np.testing.assert_array_equal(coarse.t, fine.t)
        np.testing.assert_allclose(np.exp(fine["y"] - coarse["y"]), 1.0, atol=0.01)

    def test_numeric_supply_path_tracks_closed_form(self):
        p = ValidatedParams(**SUPPLY_CURVE_CASE)
        t = np.linspace(0.0, 0.5 / p.epsilon, 2001)
        t, K, Y = solve_supply_ode(p, SUPPLY_CURVE_B, t)
        self.assertTrue(np.all(K > 0))
        Y_ana = analytic_supply_path(t, p, SUPPLY_CURVE_B)
        mask = t >= p.tau_y
        self.assertLess(np.max(np.abs(Y[mask] - Y_ana[mask]) / Y_ana[mask]), 0.05)


if __name__ == "__main__":
    unittest.main()
