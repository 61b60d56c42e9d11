import math
import unittest

import numpy as np

from halfwave.dynamics import (
    SpinLattice,
    conservation_report,
    continuum_discrepancy,
    evolve_spin_lattice,
    evolve_torus,
    lattice_energy,
    measure_wave_speed,
    momentum,
    torus_energy,
    torus_rhs,
    total_spin,
    two_spin_solution,
)
from halfwave.errors import PoleProximity, StabilityViolation
from halfwave.soliton_factory import infinite_energy_solution, pure_power_map
from halfwave.spectral_core import TORUS, CircleGrid, SphereField, sample, torus_grid
from tests.fixtures import random_real_field, seeded_rng


def _unit(vectors):
    vectors = np.asarray(vectors, dtype=float)
    return vectors / np.linalg.norm(vectors, axis=-1, keepdims=True)


class TestTorusFlow(unittest.TestCase):
    def setUp(self):
        self.v = 0.5
        self.grid = torus_grid(64)
        self.u0 = infinite_energy_solution(self.v, self.grid)

    def test_rhs_of_traveling_wave(self):
        alpha = math.sqrt(1 - self.v**2)
        theta = self.grid.theta
        expected = np.column_stack([self.v * alpha * np.sin(theta), -self.v * alpha * np.cos(theta), 0 * theta])
        np.testing.assert_allclose(torus_rhs(self.u0.values), expected, atol=1e-14)

    def test_traveling_wave_is_reproduced(self):
        dt, steps = 1e-3, 200
        trajectory = evolve_torus(self.u0, dt, steps)
        exact = infinite_energy_solution(self.v, self.grid, t=dt * steps)
        np.testing.assert_allclose(trajectory.final.values, exact.values, atol=1e-10)
        self.assertAlmostEqual(measure_wave_speed(self.u0, trajectory.final, dt * steps), self.v, delta=1e-6)

    def test_unit_time_benchmark(self):
        grid = torus_grid(256)
        u0 = infinite_energy_solution(0.5, grid)
        trajectory = evolve_torus(u0, 1e-3, 1000)
        exact = infinite_energy_solution(0.5, grid, t=1.0)
        self.assertLess(np.max(np.abs(trajectory.final.values - exact.values)), 1e-6)
        self.assertLess(conservation_report(trajectory).energy_drift, 1e-6)
        self.assertAlmostEqual(measure_wave_speed(u0, trajectory.final, 1.0), 0.5, delta=1e-3)

    def test_wave_speed_for_several_velocities(self):
        grid = torus_grid(128)
        for v in (0.25, 0.75):
            u0 = infinite_energy_solution(v, grid)
            final = evolve_torus(u0, 1e-3, 1000).final
            self.assertAlmostEqual(measure_wave_speed(u0, final, 1.0), v, delta=1e-3)

    def test_random_smooth_field_keeps_its_energy(self):
        grid = torus_grid(128)
        rng = seeded_rng(21)
        components = [sample(random_real_field(rng, 3), grid, real=True) for _ in range(3)]
        values = np.column_stack(components) + np.array([0.0, 0.0, 4.0])
        u0 = SphereField(_unit(values), grid, TORUS)
        report = conservation_report(evolve_torus(u0, 1e-3, 200))
        self.assertGreater(report.initial_energy, 0.0)
        self.assertLess(report.energy_drift, 1e-5)

    def test_conservation(self):
        trajectory = evolve_torus(self.u0, 1e-3, 100, save_every=25)
        np.testing.assert_allclose(trajectory.times, [0.0, 0.025, 0.05, 0.075, 0.1])
        report = conservation_report(trajectory)
        self.assertAlmostEqual(report.initial_energy, math.pi * (1 - self.v**2), delta=1e-12)
        self.assertLess(report.energy_drift, 1e-10)
        self.assertLess(report.norm_drift, 1e-14)
        manifest = trajectory.manifest()
        self.assertEqual(manifest["scheme"], "rk4-projected")
        self.assertTrue(manifest["dealias"])

    def test_backward_run_returns_to_start(self):
        forward = evolve_torus(self.u0, 1e-3, 50).final
        back = evolve_torus(forward, -1e-3, 50).final
        np.testing.assert_allclose(back.values, self.u0.values, atol=1e-12)

    def test_time_step_limit(self):
        with self.assertRaises(StabilityViolation):
            evolve_torus(infinite_energy_solution(0.1, torus_grid(256)), 1e-2, 1)

    def test_line_fields_are_rejected(self):
        with self.assertRaises(ValueError):
            evolve_torus(pure_power_map(1, CircleGrid(64)), 1e-3, 1)

    def test_energy_of_constant_field(self):
        self.assertEqual(torus_energy(np.tile([0.0, 0.0, 1.0], (16, 1))), 0.0)


class TestMomentum(unittest.TestCase):
    def test_small_circle(self):
        v = 0.3
        report = momentum(infinite_energy_solution(v, torus_grid(64)))
        self.assertAlmostEqual(report.raw, -2 * math.pi * (1 + v), delta=1e-10)
        self.assertAlmostEqual(report.normalized, 2 * math.pi * (1 - v), delta=1e-10)

    def test_momentum_vanishes_as_v_approaches_minus_one(self):
        previous = math.inf
        for v in (-0.9, -0.99, -0.999):
            report = momentum(infinite_energy_solution(v, torus_grid(64)))
            self.assertAlmostEqual(report.normalized, -2 * math.pi * (1 + v), delta=1e-10)
            self.assertLess(abs(report.normalized), previous)
            previous = abs(report.normalized)

    def test_pole_proximity(self):
        with self.assertRaises(PoleProximity):
            momentum(infinite_energy_solution(0.0, torus_grid(64)), e=(1.0, 0.0, 0.0))


class TestSpinLattice(unittest.TestCase):
    def test_site_positions(self):
        spins = np.tile([0.0, 0.0, 1.0], (5, 1))
        np.testing.assert_allclose(SpinLattice.on_line(0.5, spins).positions, [-1.0, -0.5, 0.0, 0.5, 1.0])
        np.testing.assert_allclose(SpinLattice.on_line(0.5, spins[:4]).positions, [-1.0, -0.5, 0.0, 0.5])

    def test_periodic_coupling_sums_images(self):
        lattice = SpinLattice.periodic(np.tile([0.0, 0.0, 1.0], (4, 1)))
        d = lattice.positions[1] - lattice.positions[0]
        j = np.arange(-20000, 20001)
        images = float(np.sum(1.0 / (d + 2 * math.pi * j) ** 2))
        self.assertAlmostEqual(lattice.coupling()[0, 1], images, delta=1e-4 * images)
        self.assertEqual(lattice.coupling()[2, 2], 0.0)

    def test_invalid_lattices(self):
        with self.assertRaises(ValueError):
            SpinLattice([0.0], [[0.0, 0.0, 1.0]])
        with self.assertRaises(ValueError):
            SpinLattice([0.0, 1.0], [[0.0, 0.0, 2.0], [0.0, 0.0, 1.0]])

    def test_energy_of_antiparallel_pair(self):
        lattice = SpinLattice.on_line(1.0, [[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]])
        self.assertAlmostEqual(lattice_energy(lattice), 2.0)

    def test_two_spins_precess_about_their_sum(self):
        s1, s2 = _unit([1.0, 0.2, 0.3]), _unit([-0.4, 1.0, 0.5])
        trajectory = evolve_spin_lattice(SpinLattice.on_line(1.0, [s1, s2]), 1e-3, 1000)
        r1, r2 = two_spin_solution(s1, s2, 1.0)
        np.testing.assert_allclose(trajectory.final.spins[0], r1, atol=1e-9)
        np.testing.assert_allclose(trajectory.final.spins[1], r2, atol=1e-9)

    def test_invariants(self):
        rng = np.random.default_rng(9)
        lattice = SpinLattice.on_line(1.0, _unit(rng.standard_normal((7, 3))))
        trajectory = evolve_spin_lattice(lattice, 1e-3, 200, save_every=50)
        self.assertEqual(len(trajectory.lattices), 5)
        drifts = trajectory.drifts()
        self.assertGreater(drifts["E0"], 0.0)
        self.assertLess(drifts["energy_drift"], 1e-8)
        self.assertLess(drifts["total_spin_drift"], 1e-8)
        np.testing.assert_allclose(total_spin(trajectory.final), total_spin(lattice), atol=1e-8)

    def test_continuum_limit(self):
        u0 = infinite_energy_solution(0.5, torus_grid(64))
        coarse, fine = continuum_discrepancy(u0, 0.05, [16, 32])
        self.assertGreater(coarse, fine)
        self.assertLess(fine, 0.6 * coarse)


if __name__ == "__main__":
    unittest.main()
