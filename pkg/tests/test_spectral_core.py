import math
import unittest

import numpy as np

from halfwave.errors import PoleOnGrid
from halfwave.spectral_core import (
    INFINITY,
    TORUS,
    CircleGrid,
    FourierField,
    SphereField,
    circle_quadrature,
    derivative_multiplier,
    halfwave_multiplier,
    hdot_half_norm_squared,
    hilbert_multiplier,
    line_derivative,
    line_double_integral_norm,
    pullback_halfwave,
    sample,
    stereographic_lift,
    stereographic_lift_array,
    stereographic_project,
    transform,
)
from tests.fixtures import random_real_field, seeded_rng


class TestStereographic(unittest.TestCase):
    def test_known_points(self):
        self.assertAlmostEqual(stereographic_project(0.0), 1.0, places=14)
        self.assertAlmostEqual(stereographic_project(math.pi), -1.0, places=14)
        self.assertAlmostEqual(stereographic_project(3 * math.pi / 2), 0.0, places=14)
        self.assertIs(stereographic_project(math.pi / 2), INFINITY)

    def test_lift_inverts_project(self):
        for theta in np.linspace(0.0, 2 * math.pi, 37, endpoint=False):
            if abs(theta - math.pi / 2) < 1e-9:
                continue
            self.assertAlmostEqual(stereographic_lift(stereographic_project(theta)), theta, delta=1e-12)

    def test_lift_of_infinity(self):
        self.assertEqual(stereographic_lift(INFINITY), math.pi / 2)

    def test_array_lift_recovers_grid_angles(self):
        grid = CircleGrid(64)
        np.testing.assert_allclose(stereographic_lift_array(grid.x), grid.theta, atol=1e-12)


class TestCircleGrid(unittest.TestCase):
    def test_default_offset_avoids_pole(self):
        grid = CircleGrid(64)
        self.assertAlmostEqual(grid.offset, math.pi / 64)
        self.assertTrue(grid.pole_avoiding)
        self.assertEqual(grid.band_limit, 31)

    def test_offset_when_n_is_not_a_multiple_of_four(self):
        self.assertTrue(CircleGrid(10).pole_avoiding)
        self.assertTrue(CircleGrid(18).pole_avoiding)

    def test_grid_through_pole(self):
        grid = CircleGrid(64, offset=math.pi / 2)
        self.assertFalse(grid.pole_avoiding)
        with self.assertRaises(PoleOnGrid):
            grid.x
        with self.assertRaises(PoleOnGrid):
            circle_quadrature(np.ones(64), grid, weighted=True)

    def test_invalid_sizes(self):
        for n in (6, 7, 33):
            with self.assertRaises(ValueError):
                CircleGrid(n)


class TestTransform(unittest.TestCase):
    def test_coefficients_of_trigonometric_polynomial(self):
        grid = CircleGrid(32)
        theta = grid.theta
        F = transform(np.cos(3 * theta) + 0.5 * np.sin(theta), grid)
        self.assertAlmostEqual(F.coeff(3), 0.5, delta=1e-14)
        self.assertAlmostEqual(F.coeff(-3), 0.5, delta=1e-14)
        self.assertAlmostEqual(F.coeff(1), -0.25j, delta=1e-14)
        self.assertAlmostEqual(F.coeff(-1), 0.25j, delta=1e-14)
        self.assertAlmostEqual(abs(F.coeff(0)), 0.0, delta=1e-14)

    def test_sample_inverts_transform(self):
        rng = seeded_rng()
        grid = CircleGrid(64)
        F = random_real_field(rng, 20)
        G = transform(sample(F, grid), grid, 20)
        np.testing.assert_allclose(G.coeffs, F.coeffs, atol=1e-14)

    def test_band_too_large(self):
        with self.assertRaises(ValueError):
            transform(np.ones(16), CircleGrid(16), 8)


class TestMultipliers(unittest.TestCase):
    def test_hilbert_of_halfwave_is_derivative(self):
        F = random_real_field(seeded_rng(), 12)
        np.testing.assert_allclose(
            hilbert_multiplier(halfwave_multiplier(F)).coeffs, derivative_multiplier(F).coeffs, atol=1e-15
        )

    def test_hilbert_kills_mean(self):
        F = FourierField.from_mapping({0: 2.0, 1: 1.0}, 2)
        self.assertEqual(hilbert_multiplier(F).coeff(0), 0)
        self.assertEqual(hilbert_multiplier(F).coeff(1), 1j)

    def test_halfwave_of_poisson_kernel(self):
        # 1/(1+x^2) lifts to (1 - sin theta)/2; its |nabla| is (1 - x^2)/(1 + x^2)^2
        grid = CircleGrid(64)
        F = FourierField.from_mapping({0: 0.5, 1: 0.25j, -1: -0.25j}, 1)
        result = pullback_halfwave(F, grid)
        x = result.x
        np.testing.assert_allclose(result.values.real, (1 - x**2) / (1 + x**2) ** 2, atol=1e-12)
        self.assertLess(np.max(np.abs(result.values.imag)), 1e-13)

    def test_line_derivative_of_poisson_kernel(self):
        grid = CircleGrid(64)
        F = FourierField.from_mapping({0: 0.5, 1: 0.25j, -1: -0.25j}, 1)
        x = grid.x
        np.testing.assert_allclose(line_derivative(F, grid).real, -2 * x / (1 + x**2) ** 2, atol=1e-12)


class TestQuadrature(unittest.TestCase):
    def test_parseval(self):
        grid = CircleGrid(64)
        F = random_real_field(seeded_rng(), 15)
        values = sample(F, grid)
        integral = circle_quadrature(np.abs(values) ** 2, grid)
        self.assertAlmostEqual(integral, 2 * math.pi * np.sum(np.abs(F.coeffs) ** 2), delta=1e-12)

    def test_weighted_quadrature_gives_line_integrals(self):
        grid = CircleGrid(64)
        weight = grid.weight
        # integral of 2/(1+x^2) dx = 2 pi
        self.assertAlmostEqual(circle_quadrature(weight, grid, weighted=True), 2 * math.pi, delta=1e-12)
        # integral of 1/(1+x^2)^2 dx = pi/2
        self.assertAlmostEqual(circle_quadrature(weight**2 / 4, grid, weighted=True), math.pi / 2, delta=1e-12)

    def test_conformal_norm_identity(self):
        F = FourierField.from_mapping({0: 0.5, 1: 0.25j, -1: -0.25j}, 1)
        expected = hdot_half_norm_squared(F)
        self.assertAlmostEqual(expected, math.pi / 4, delta=1e-15)
        self.assertAlmostEqual(line_double_integral_norm(lambda x: 1 / (1 + x**2), 256), expected, delta=1e-10)


class TestFields(unittest.TestCase):
    def test_pad_and_restrict(self):
        F = FourierField.from_mapping({-1: 1.0, 2: 3.0}, 2)
        padded = F.pad(5)
        self.assertEqual(padded.K, 5)
        self.assertEqual(padded.coeff(2), 3.0)
        self.assertEqual(padded.restrict(2).coeff(-1), 1.0)
        self.assertEqual(F.coeff(9), 0)
        self.assertEqual(F.support_radius(), 2)

    def test_is_real(self):
        self.assertTrue(random_real_field(seeded_rng(), 4).is_real())
        self.assertFalse(FourierField.from_mapping({1: 1.0}, 1).is_real())

    def test_sphere_field_rejects_non_unit_values(self):
        grid = CircleGrid(8, offset=0.0)
        with self.assertRaises(ValueError):
            SphereField(np.full((8, 3), 0.5), grid, TORUS)
        with self.assertRaises(ValueError):
            SphereField(np.tile([0.0, 0.0, 1.0], (8, 1)), grid, "cylinder")


if __name__ == "__main__":
    unittest.main()
