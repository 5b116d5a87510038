import math
import unittest

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from dynamic_solow.analysis import cycle_durations
from dynamic_solow.equilibria import (
    classify,
    cycle_from_series,
    detect_limit_cycle,
    equilibria,
    scan_grid,
    sentiment_equilibrium_roots,
)
from dynamic_solow.dynamics import ReducedState
from dynamic_solow.exceptions import NegativeRate
from dynamic_solow.integrator import phase_portrait, simulate_reduced
from dynamic_solow.params import SimConfig, ValidatedParams
from dynamic_solow.policies import EQUILIBRIUM_RESIDUAL

BASE = ValidatedParams()
SUPERCRITICAL = BASE.with_overrides(gamma=4000, c2=1e-4)


class SentimentRootTests(unittest.TestCase):
    def test_symmetric_herding_roots(self):
        roots = sentiment_equilibrium_roots(BASE.with_overrides(beta2=0.0))
        self.assertEqual(len(roots), 3)
        low, mid, high = roots
        self.assertAlmostEqual(high, 0.5, delta=0.01)
        self.assertAlmostEqual(low, -high, delta=1e-9)
        self.assertAlmostEqual(mid, 0.0, delta=1e-9)

    def test_roots_symmetric_without_technology(self):
        roots = np.array(sentiment_equilibrium_roots(BASE.with_overrides(epsilon=0.0, beta2=1.5)))
        self.assertEqual(roots.size, 3)
        np.testing.assert_allclose(roots, -roots[::-1], atol=1e-9)

    def test_weak_herding_has_single_root(self):
        roots = sentiment_equilibrium_roots(BASE.with_overrides(beta1=0.9, beta2=0.0))
        self.assertEqual(len(roots), 1)
        self.assertAlmostEqual(roots[0], 0.0, delta=1e-9)

    def test_base_case_favours_optimism(self):
        roots = sentiment_equilibrium_roots(BASE)
        self.assertEqual(len(roots), 3)
        self.assertGreater(roots[-1], abs(roots[0]))

    def test_roots_solve_condition(self):
        p = BASE
        for s in sentiment_equilibrium_roots(p):
            lhs = math.atanh(s) - p.beta1 * s
            rhs = p.beta2 * math.tanh(p.gamma * (p.rho * p.c2 * s + p.epsilon))
            self.assertAlmostEqual(lhs, rhs, delta=1e-9)

    def test_negative_coupling_rejected(self):
        with self.assertRaises(NegativeRate):
            sentiment_equilibrium_roots(BASE.with_overrides(beta2=-0.5))


class EquilibriaTests(unittest.TestCase):
    def test_base_case_classification(self):
        points = equilibria(BASE)
        self.assertEqual(
            [(pt.kind, pt.stability) for pt in points],
            [("focus", "stable"), ("saddle", "unstable"), ("focus", "stable")],
        )
        for pt in points:
            self.assertLess(pt.residual, EQUILIBRIUM_RESIDUAL)
            self.assertEqual(len(pt.eigenvalues), 3)

    def test_supercritical_single_unstable_focus(self):
        points = equilibria(SUPERCRITICAL)
        self.assertEqual(len(points), 1)
        self.assertEqual((points[0].kind, points[0].stability), ("focus", "unstable"))

    def test_symmetry_without_technology_and_coupling(self):
        points = equilibria(BASE.with_overrides(epsilon=0.0, beta2=0.0))
        self.assertEqual(len(points), 3)
        low, mid, high = points
        self.assertAlmostEqual(low.s, -high.s, delta=1e-7)
        self.assertAlmostEqual(low.h, -high.h, delta=1e-7)
        self.assertAlmostEqual(math.expm1(low.z), -math.expm1(high.z), delta=1e-7)
        self.assertAlmostEqual(mid.s, 0.0, delta=1e-7)

    def test_symmetry_without_technology_with_coupling(self):
        points = equilibria(BASE.with_overrides(epsilon=0.0, beta2=1.5))
        self.assertEqual(len(points), 3)
        coords = np.array([[pt.s, pt.h, math.expm1(pt.z)] for pt in points])
        np.testing.assert_allclose(coords, -coords[::-1], atol=1e-7)

    def test_stable_focus_attracts_nearby_start(self):
        target = equilibria(BASE)[0]
        cfg = SimConfig(t_end=400_000.0, record_stride=100, regime_mode="reduced_deterministic")
        traj = simulate_reduced(BASE, cfg, xi_on=False, start=ReducedState(-0.5, -0.5, -0.1))
        end = np.array([traj["s"][-1], traj["h"][-1], traj["z"][-1]])
        np.testing.assert_allclose(end, [target.s, target.h, target.z], atol=1e-3)

    def test_portrait_labels_equilibrium_start(self):
        points = equilibria(BASE)
        (result,) = phase_portrait(BASE, [points[-1].state])
        self.assertEqual(result.label, f"equilibrium:{len(points) - 1}")


class ClassifyTests(unittest.TestCase):
    def test_examples(self):
        self.assertEqual(classify([-1.0, -2.0, -3.0]), ("node", "stable"))
        self.assertEqual(classify([1.0, 2.0, 3.0]), ("node", "unstable"))
        self.assertEqual(classify([-1.0, 2.0, -3.0]), ("saddle", "unstable"))
        self.assertEqual(classify([-1e-3 + 2e-3j, -1e-3 - 2e-3j, -1e-2]), ("focus", "stable"))
        self.assertEqual(classify([1e-3 + 2e-3j, 1e-3 - 2e-3j, -1e-2]), ("focus", "unstable"))
        self.assertEqual(classify([0.0, -1.0, -2.0]), ("node", "marginal"))

    @given(
        re=st.floats(1e-6, 1.0),
        im=st.floats(1e-6, 1.0),
        other=st.floats(1e-6, 1.0),
        signs=st.tuples(st.sampled_from([-1, 1]), st.sampled_from([-1, 1])),
    )
    def test_complex_pair_is_focus(self, re, im, signs, other):
        a, b = signs
        kind, stability = classify([a * re + 1j * im, a * re - 1j * im, b * other])
        self.assertEqual(kind, "focus")
        self.assertEqual(stability, "stable" if a < 0 and b < 0 else "unstable")


class LimitCycleTests(unittest.TestCase):
    def test_damped_oscillation_is_not_a_cycle(self):
        t = np.arange(0.0, 200_000.0)
        s = 0.3 * np.exp(-t / 50_000.0) * np.sin(2 * np.pi * t / 5000.0)
        self.assertIsNone(cycle_from_series(t, s))

    def test_sustained_oscillation_is_a_cycle(self):
        t = np.arange(0.0, 200_000.0)
        cycle = cycle_from_series(t, 0.1 + 0.3 * np.sin(2 * np.pi * t / 5000.0))
        self.assertIsNotNone(cycle)
        self.assertAlmostEqual(cycle.period, 5000.0, delta=1e-3)
        self.assertAlmostEqual(cycle.amplitude, 0.3, delta=1e-4)

    def test_converging_to_focus_is_not_a_cycle(self):
        target = equilibria(BASE)[-1]
        probe = ReducedState(target.s + 0.01, target.h, target.z)
        self.assertIsNone(detect_limit_cycle(BASE, probe))

    def test_supercritical_cycle_period_matches_durations(self):
        probe = ReducedState(0.1, 0.0, 0.0)
        cycle = detect_limit_cycle(SUPERCRITICAL, probe)
        self.assertIsNotNone(cycle)
        cfg = SimConfig(t_end=400_000.0, regime_mode="reduced_deterministic")
        traj = simulate_reduced(SUPERCRITICAL, cfg, xi_on=False, start=probe)
        tail = traj.t >= 200_000.0
        s = traj["s"][tail]
        durations = cycle_durations(traj.t[tail], s - s.mean())
        self.assertAlmostEqual(durations.mean() / cycle.period, 1.0, delta=0.01)


class ScanTests(unittest.TestCase):
    def test_failed_point_is_recorded_and_order_kept(self):
        grid = [{"gamma": 350.0}, {"rho": 1.5}, {"gamma": 4000.0, "c2": 1e-4}]
        records = scan_grid(BASE, grid, parallelism=3, t_end=20_000.0)
        self.assertEqual([r.gamma for r in records], [350.0, 2000.0, 4000.0])
        self.assertIsNone(records[0].error)
        self.assertIn("ShareOutOfRange", records[1].error)
        self.assertEqual(records[1].equilibria, ())
        self.assertEqual(len(records[2].equilibria), 1)


if __name__ == "__main__":
    unittest.main()
