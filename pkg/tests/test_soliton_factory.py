import math
import unittest

import numpy as np
import pytest

from halfwave.errors import DomainError, SpectralTailWarning, VelocityOutOfRange
from halfwave.soliton_factory import (
    BlaschkeProduct,
    blaschke_boundary_values,
    blaschke_eval,
    boost_sphere_values,
    build_profile,
    energy_analytic,
    energy_numeric,
    infinite_energy_solution,
    lorentz_boost,
    profile_rows,
    pure_power_components,
    pure_power_map,
    random_blaschke,
    rotation_matrix,
)
from halfwave.spectral_core import INFINITY, CircleGrid, torus_grid
from tests.fixtures import random_profiles, rng, small_grid  # noqa: F401


@pytest.mark.usefixtures("small_grid")
class TestBlaschkeProduct(unittest.TestCase):
    def test_pure_power_lifts_to_circle_power(self):
        theta = self.grid.theta
        for m in (1, 2, 5):
            values = blaschke_boundary_values(BlaschkeProduct.pure_power(m), theta)
            np.testing.assert_allclose(values, np.exp(1j * m * theta), atol=1e-13)

    def test_unimodular_on_the_line_and_zero_inside(self):
        B = BlaschkeProduct(phase=0.3, scales=(0.7, 2.0), centers=(-1.0, 0.5))
        for x in (-10.0, -1.0, 0.0, 0.3, 7.5):
            self.assertAlmostEqual(abs(blaschke_eval(B, x)), 1.0, delta=1e-14)
        self.assertAlmostEqual(abs(blaschke_eval(B, -1.0 + 1j / 0.7)), 0.0, delta=1e-15)
        self.assertEqual(B.degree, 2)

    def test_lower_half_plane_is_rejected(self):
        with self.assertRaises(DomainError):
            blaschke_eval(BlaschkeProduct.pure_power(1), 0.5 - 0.1j)

    def test_invalid_parameters(self):
        with self.assertRaises(DomainError):
            BlaschkeProduct(scales=(1.0,), centers=())
        with self.assertRaises(DomainError):
            BlaschkeProduct(scales=(-1.0,), centers=(0.0,))
        with self.assertRaises(DomainError):
            BlaschkeProduct(sign=0)

    def test_rescaled_moves_zeros(self):
        B = BlaschkeProduct(phase=0.0, scales=(2.0,), centers=(1.0,)).rescaled(3.0)
        self.assertEqual(B.centers, (3.0,))
        self.assertAlmostEqual(B.scales[0], 2.0 / 3.0)

    def test_rescaling_keeps_the_energy(self):
        B = BlaschkeProduct(phase=0.4, scales=(1.5, 0.8), centers=(-0.5, 1.0))
        grid = CircleGrid(1024)
        before = energy_numeric(build_profile(B, 0.3, grid).field)
        after = energy_numeric(build_profile(B.rescaled(1.7), 0.3, grid).field)
        self.assertAlmostEqual(after, before, delta=1e-9)

    def test_random_blaschke_ranges(self):
        B = random_blaschke(np.random.default_rng(7), 4, sign=-1)
        self.assertEqual(B.degree, 4)
        self.assertEqual(B.sign, -1)
        self.assertTrue(all(0.2 <= s <= 5.0 for s in B.scales))
        self.assertTrue(all(-3.0 <= a <= 3.0 for a in B.centers))


@pytest.mark.usefixtures("small_grid")
class TestPurePowerMap(unittest.TestCase):
    def test_closed_form_matches_circle_power(self):
        theta = self.grid.theta
        for m in (1, 2, 3, 6):
            Q = pure_power_map(m, self.grid)
            np.testing.assert_allclose(Q.values[:, 0], np.cos(m * theta), atol=1e-12)
            np.testing.assert_allclose(Q.values[:, 1], np.sin(m * theta), atol=1e-12)

    def test_limits_at_infinity(self):
        self.assertEqual(pure_power_components(1, INFINITY), (0.0, 1.0))
        self.assertEqual(pure_power_components(2, INFINITY), (-1.0, 0.0))
        f, g = pure_power_components(2, 1e8)
        self.assertAlmostEqual(f, -1.0, delta=1e-12)
        self.assertAlmostEqual(g, 0.0, delta=1e-7)

    def test_degree_zero_is_rejected(self):
        with self.assertRaises(DomainError):
            pure_power_map(0, self.grid)


@pytest.mark.usefixtures("small_grid")
class TestBoosts(unittest.TestCase):
    def test_lorentz_boost_matches_blaschke_profile(self):
        for m in (1, 3):
            boosted = lorentz_boost(pure_power_map(m, self.grid), 0.6)
            built = build_profile(BlaschkeProduct.pure_power(m), 0.6, self.grid)
            np.testing.assert_allclose(boosted.field.values, built.field.values, atol=1e-12)

    def test_moebius_boost_matches_lorentz_boost(self):
        v = -0.4
        Q = pure_power_map(2, self.grid)
        np.testing.assert_allclose(
            boost_sphere_values(Q.values, math.atanh(v)), lorentz_boost(Q, v).field.values, atol=1e-12
        )

    def test_boosts_compose_by_adding_rapidities(self):
        points = np.random.default_rng(5).standard_normal((40, 3))
        points /= np.linalg.norm(points, axis=1, keepdims=True)
        twice = boost_sphere_values(boost_sphere_values(points, 0.3), -0.8)
        np.testing.assert_allclose(twice, boost_sphere_values(points, -0.5), atol=1e-12)

    def test_boost_fixes_poles(self):
        poles = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]])
        np.testing.assert_allclose(boost_sphere_values(poles, 0.8), poles, atol=1e-15)

    def test_velocity_range(self):
        with self.assertRaises(VelocityOutOfRange):
            build_profile(BlaschkeProduct.pure_power(1), 1.0, self.grid)
        with self.assertRaises(VelocityOutOfRange):
            energy_analytic(BlaschkeProduct.pure_power(1), -1.5)

    def test_lorentz_boost_needs_equatorial_map(self):
        tilted = build_profile(BlaschkeProduct.pure_power(1), 0.3, self.grid)
        with self.assertRaises(DomainError):
            lorentz_boost(tilted.field, 0.2)

    def test_anti_holomorphic_branch(self):
        up = build_profile(BlaschkeProduct.pure_power(2), 0.5, self.grid)
        down = build_profile(BlaschkeProduct.pure_power(2, sign=-1), 0.5, self.grid)
        np.testing.assert_allclose(down.field.values[:, 1], -up.field.values[:, 1], atol=1e-15)
        np.testing.assert_allclose(down.field.values[:, 2], -0.5, atol=1e-15)


@pytest.mark.usefixtures("rng")
class TestEnergy(unittest.TestCase):
    def test_energy_of_random_profiles(self):
        for profile in random_profiles(20, (0.0, 0.3, 0.6, 0.9)):
            expected = energy_analytic(profile.blaschke, profile.velocity)
            self.assertAlmostEqual(energy_numeric(profile.field), expected, delta=1e-8 * expected)

    def test_energy_is_rotation_invariant(self):
        grid = CircleGrid(1024)
        B = random_blaschke(self.rng, 2)
        plain = build_profile(B, 0.3, grid)
        rotated = build_profile(B, 0.3, grid, rotation_matrix([0.3, -1.2, 0.7]))
        self.assertAlmostEqual(energy_numeric(rotated.field), energy_numeric(plain.field), delta=1e-10)
        np.testing.assert_allclose(rotated.unrotated_values, plain.field.values, atol=1e-14)

    def test_on_grid_rematerializes(self):
        profile = build_profile(BlaschkeProduct.pure_power(2), 0.2, CircleGrid(64))
        finer = profile.on_grid(CircleGrid(256))
        self.assertEqual(finer.field.grid.n_points, 256)
        self.assertEqual(finer.degree, 2)

    def test_coarse_grid_warns(self):
        sharp = BlaschkeProduct(phase=0.0, scales=(20.0,), centers=(0.0,))
        profile = build_profile(sharp, 0.0, CircleGrid(16))
        with self.assertWarns(SpectralTailWarning):
            energy_numeric(profile.field)


class TestOutputs(unittest.TestCase):
    def test_profile_rows(self):
        grid = CircleGrid(16)
        rows = profile_rows(build_profile(BlaschkeProduct.pure_power(1), 0.1, grid))
        self.assertEqual(len(rows), 16)
        self.assertEqual(len(rows[0]), 5)
        self.assertAlmostEqual(rows[3][1], float(grid.x[3]))
        self.assertAlmostEqual(rows[3][4], 0.1)

    def test_infinite_energy_solution_travels(self):
        grid = torus_grid(32)
        moved = infinite_energy_solution(0.5, grid, t=2.0)
        alpha = math.sqrt(0.75)
        np.testing.assert_allclose(moved.values[:, 0], alpha * np.cos(grid.theta - 1.0), atol=1e-15)
        np.testing.assert_allclose(moved.values[:, 2], 0.5, atol=1e-15)


if __name__ == "__main__":
    unittest.main()
