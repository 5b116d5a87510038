"""
Scenario plumbing tests plus the reproduction scenarios.

The scenarios built on a few hundred simulated years run by default; the
50,000-year ones (and the parameter scans) run only when DSOLOW_SLOW_TESTS=1.
"""

import os
import tempfile
import unittest
from pathlib import Path

import numpy as np

from dynamic_solow.analysis import growth_rate
from dynamic_solow.config import RuntimeConfig
from dynamic_solow.integrator import Trajectory, simulate
from dynamic_solow.params import SimConfig, ValidatedParams, derived_quantities
from dynamic_solow.registry import get_scenario
from dynamic_solow.scenarios.base import ScenarioResult, check
from dynamic_solow.scenarios.builtin.general_growth import capital_gaps
from dynamic_solow.scenarios.builtin.supply_growth import sentiment_driven_demand
from dynamic_solow.scenarios.runs import balanced_config, ensemble_seeds, general_ensemble, map_seeds

SLOW = os.getenv("DSOLOW_SLOW_TESTS") == "1"
BASE = ValidatedParams()
R = derived_quantities(BASE).R


class CheckTests(unittest.TestCase):
    def test_result_passes_only_when_every_check_passes(self):
        good = check("a", True, 1.0, "1")
        bad = check("b", False, 0.123456789, "> 1")
        self.assertEqual(bad.measured, "0.123457")
        self.assertTrue(ScenarioResult(scenario="x", checks=[good]).passed)
        self.assertFalse(ScenarioResult(scenario="x", checks=[good, bad]).passed)
        self.assertTrue(bad.line().startswith("FAIL b:"))


class RunHelperTests(unittest.TestCase):
    def test_seeds_are_stable(self):
        self.assertEqual(ensemble_seeds(4), ensemble_seeds(8)[:4])

    def test_map_seeds_reraises_failure(self):
        def fn(seed):
            if seed == 2:
                raise RuntimeError("seed 2")
            return seed

        self.assertEqual(map_seeds(fn, [0, 1], RuntimeConfig(parallelism=2)), [0, 1])
        with self.assertRaises(RuntimeError):
            map_seeds(fn, [0, 1, 2], RuntimeConfig(parallelism=2))

    def test_balanced_config(self):
        cfg = balanced_config(BASE, "forced_supply", 400, seed=3)
        self.assertEqual((cfg.t_end, cfg.regime_mode, cfg.seed), (100_000.0, "forced_supply", 3))
        self.assertEqual(cfg.initial.ks0, cfg.initial.kd0)
        self.assertTrue(balanced_config(BASE, "general", 10, mirror_noise=True).mirror_noise)

    def test_capital_gaps(self):
        t = np.arange(0.0, 150_001.0, 25.0)
        n = t.size
        k_s = np.zeros(n)
        k_d = np.where(t >= 125_000.0, 2.0, 0.5)
        columns = {"t": t, "y": np.zeros(n), "k_s": k_s, "k_d": k_d, "k": np.minimum(k_s, k_d),
                   "s": np.zeros(n), "h": np.zeros(n), "xi": np.zeros(n)}
        traj = Trajectory(columns=columns, params=BASE, config=SimConfig(t_end=150_000.0),
                          regime=(k_d <= k_s).astype(np.int8))
        self.assertEqual(capital_gaps(traj, span_years=100), (2.0, 0.5))
        # A 500-year mid-run span reaches the late step too
        self.assertEqual(capital_gaps(traj, span_years=500), (2.0, 2.0))

    def test_demand_capital_is_sentiment_integral(self):
        traj = simulate(BASE, balanced_config(BASE, "forced_supply", 200, seed=5))
        rebuilt = sentiment_driven_demand(traj, BASE)
        self.assertLess(np.max(np.abs(rebuilt - traj["k_d"])), 1e-2)


class ForcedDemandTests(unittest.TestCase):
    """Short forced-demand runs: supply capital trails output at a bounded distance."""

    def test_bounded_and_growing(self):
        def one(seed):
            return simulate(BASE, balanced_config(BASE, "forced_demand", 500, seed))

        runs = map_seeds(one, ensemble_seeds(3), RuntimeConfig())
        y_slopes = []
        for traj in runs:
            for name in ("y", "k_s", "k_d", "s", "h"):
                self.assertTrue(np.all(np.isfinite(traj[name])), name)
            lag = traj["k_s"] - traj["y"]
            self.assertGreater(lag.min(), 3.0)
            self.assertLess(lag.max(), 15.0)
            window = (0.5 * traj.t[-1], traj.t[-1])
            y_slopes.append(growth_rate(traj.t, traj["y"], window, "y").slope)
            self.assertGreater(growth_rate(traj.t, traj["k_s"], window, "k_s").slope, 0.0)
        self.assertGreater(np.mean(y_slopes), 0.0)


class GeneralModeTests(unittest.TestCase):
    def test_output_slope_near_solow_rate(self):
        runs = general_ensemble(BASE, RuntimeConfig(), years=5000, n_seeds=4)
        slope = np.mean([growth_rate(tr.t, tr["y"], variable="y").slope for tr in runs])
        self.assertGreater(slope, 0.5 * R)
        self.assertLess(slope, 1.5 * R)


class ScenarioRunner:
    def _run(self, name):
        with tempfile.TemporaryDirectory() as tmp:
            result = get_scenario(name).run(Path(tmp), RuntimeConfig())
            for output in result.outputs:
                self.assertTrue((Path(tmp) / output).exists(), output)
        for c in result.checks:
            with self.subTest(check=c.name):
                self.assertTrue(c.passed, c.line())


class ShortScenarioTests(ScenarioRunner, unittest.TestCase):
    def test_equilibria_base(self):
        self._run("equilibria_base")

    def test_supply_growth(self):
        self._run("supply_growth")

    def test_analytic_vs_numeric(self):
        self._run("analytic_vs_numeric")

    def test_limit_cycle_stagnation(self):
        self._run("limit_cycle_stagnation")

    def test_coherence_growth(self):
        self._run("coherence_growth")


@unittest.skipUnless(SLOW, "set DSOLOW_SLOW_TESTS=1 to run the 50,000-year scenarios")
class LongScenarioTests(ScenarioRunner, unittest.TestCase):
    def test_general_growth(self):
        self._run("general_growth")

    def test_cycle_histogram(self):
        self._run("cycle_histogram")

    def test_regime_fraction(self):
        self._run("regime_fraction")

    def test_bifurcation_sequence(self):
        self._run("bifurcation_sequence")

    def test_micro_oracle(self):
        self._run("micro_oracle")


if __name__ == "__main__":
    unittest.main()
