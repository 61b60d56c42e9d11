"""Traveling solitary waves built from finite Blaschke products.

Every finite-energy traveling wave with |v| < 1 is, up to a rotation R of the
target sphere, of the form

    Q_v = R (sqrt(1 - v^2) Re B, sqrt(1 - v^2) s Im B, s v)

where B is a finite Blaschke product of the upper half-plane and s = +1 (-1)
selects the holomorphic (anti-holomorphic) branch.
"""

import cmath
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.spatial.transform import Rotation
from scipy.special import eval_chebyt, eval_chebyu

from halfwave.errors import DomainError, SpectralTailWarning, VelocityOutOfRange
from halfwave.spectral_core import (
    STEREOGRAPHIC_LINE,
    TORUS,
    CircleGrid,
    SphereField,
    hdot_half_norm_squared,
    is_infinity,
)

logger = logging.getLogger(__name__)

SCALE_RANGE = (0.2, 5.0)
CENTER_RANGE = (-3.0, 3.0)
TAIL_FRACTION = 0.9
TAIL_TOLERANCE = 1e-8
_PLANAR_TOLERANCE = 1e-12

# cos(k pi / 2) and sin(k pi / 2) indexed by k mod 4
_COS_QUARTER = (1.0, 0.0, -1.0, 0.0)
_SIN_QUARTER = (0.0, 1.0, 0.0, -1.0)


@dataclass(frozen=True)
class BlaschkeProduct:
    """B(z) = exp(i phase) prod_k (scale_k (z - center_k) - i) / (scale_k (z - center_k) + i)."""

    phase: float = 0.0
    scales: Tuple[float, ...] = ()
    centers: Tuple[float, ...] = ()
    sign: int = 1

    def __post_init__(self):
        object.__setattr__(self, "scales", tuple(float(s) for s in self.scales))
        object.__setattr__(self, "centers", tuple(float(a) for a in self.centers))
        if len(self.scales) != len(self.centers):
            raise DomainError(
                f"A Blaschke product needs one center per scale, got {len(self.scales)} scales "
                f"and {len(self.centers)} centers."
            )
        if any(s <= 0 for s in self.scales):
            raise DomainError(f"Blaschke scales must be positive, got {self.scales}.")
        if self.sign not in (1, -1):
            raise DomainError(f"The holomorphy sign must be +1 or -1, got {self.sign}.")

    @property
    def degree(self) -> int:
        return len(self.scales)

    @classmethod
    def pure_power(cls, m: int, sign: int = 1) -> "BlaschkeProduct":
        """The product whose circle lift is exp(i m theta)."""
        return cls(phase=m * math.pi / 2, scales=(1.0,) * m, centers=(0.0,) * m, sign=sign)

    def rescaled(self, factor: float) -> "BlaschkeProduct":
        """B(x / factor): centers move to factor * a, scales shrink by factor."""
        return BlaschkeProduct(
            self.phase,
            tuple(s / factor for s in self.scales),
            tuple(a * factor for a in self.centers),
            self.sign,
        )


def blaschke_eval(B: BlaschkeProduct, z: complex) -> complex:
    z = complex(z)
    if z.imag < 0:
        raise DomainError(f"Blaschke products are evaluated on the closed upper half-plane, got z = {z}.")
    value = cmath.exp(1j * B.phase)
    for scale, center in zip(B.scales, B.centers):
        w = scale * (z - center)
        value *= (w - 1j) / (w + 1j)
    return value


def blaschke_boundary_values(B: BlaschkeProduct, theta) -> np.ndarray:
    """B on the real line, sampled through the circle angles theta.

    The node theta = pi/2 maps to infinity where every factor equals one.
    """
    theta = np.asarray(theta, dtype=float)
    at_pole = np.abs(1.0 - np.sin(theta)) < 1e-30
    safe = np.where(at_pole, 0.0, theta)
    x = np.cos(safe) / (1.0 - np.sin(safe))
    values = np.full(theta.shape, cmath.exp(1j * B.phase), dtype=complex)
    for scale, center in zip(B.scales, B.centers):
        w = scale * (x - center)
        values *= np.where(at_pole, 1.0, (w - 1j) / (w + 1j))
    return values


def pure_power_components(m: int, x) -> Tuple[float, float]:
    """(f_m(x), g_m(x)) from the Chebyshev closed forms, with the limits at infinity."""
    if is_infinity(x):
        return _COS_QUARTER[m % 4], _SIN_QUARTER[m % 4]
    x = float(x)
    y = 2.0 * x / (1.0 + x * x)
    f = float(eval_chebyt(m, y))
    g = (x * x - 1.0) / (1.0 + x * x) * float(eval_chebyu(m - 1, y)) if m >= 1 else 0.0
    return f, g


def pure_power_map(m: int, grid: CircleGrid) -> SphereField:
    """Samples of Q_m = (f_m, g_m, 0), the degree-m equatorial half-harmonic map."""
    if m < 1:
        raise DomainError(f"The pure power map needs m >= 1, got {m}.")
    x = grid.x
    y = 2.0 * x / (1.0 + x * x)
    f = eval_chebyt(m, y)
    g = (x * x - 1.0) / (1.0 + x * x) * eval_chebyu(m - 1, y)
    values = np.column_stack([f, g, np.zeros_like(f)])
    # renormalize away the last ulp so the unit-norm invariant holds exactly
    values /= np.linalg.norm(values, axis=1, keepdims=True)
    return SphereField(values, grid, STEREOGRAPHIC_LINE)


def rotation_matrix(rotvec: Optional[Sequence[float]] = None) -> np.ndarray:
    if rotvec is None:
        return np.eye(3)
    return Rotation.from_rotvec(np.asarray(rotvec, dtype=float)).as_matrix()


def _check_velocity(v: float):
    if not abs(v) < 1:
        raise VelocityOutOfRange(f"Traveling waves need |v| < 1, got v = {v}.")


@dataclass(frozen=True, eq=False)
class SolitonProfile:
    blaschke: Optional[BlaschkeProduct]
    velocity: float
    field: SphereField
    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    sign: int = 1

    def __post_init__(self):
        _check_velocity(self.velocity)
        rotation = np.asarray(self.rotation, dtype=float)
        if rotation.shape != (3, 3):
            raise ValueError("The target rotation must be a 3x3 matrix.")
        if np.max(np.abs(rotation.T @ rotation - np.eye(3))) > 1e-12 or np.linalg.det(rotation) <= 0:
            raise ValueError("The target rotation must be orthogonal with determinant one.")
        object.__setattr__(self, "rotation", rotation)

    @property
    def degree(self) -> int:
        return self.blaschke.degree if self.blaschke is not None else 0

    @property
    def unrotated_values(self) -> np.ndarray:
        return self.field.values @ self.rotation

    def on_grid(self, grid: CircleGrid) -> "SolitonProfile":
        """Re-materialize the same profile on another grid."""
        if self.blaschke is None:
            raise ValueError("Only Blaschke-built profiles can be re-materialized.")
        return build_profile(self.blaschke, self.velocity, grid, self.rotation)


def boost_sphere_values(values, chi: float) -> np.ndarray:
    """Moebius boost of sphere points with rapidity chi.

    Points are sent to the chart zeta = (u1 + i u2) / (1 - u3), scaled by
    exp(chi) and mapped back. The equator lands at height tanh(chi); the poles
    are fixed.
    """
    values = np.asarray(values, dtype=float)
    at_north = 1.0 - values[:, 2] < 1e-15
    denom = np.where(at_north, 1.0, 1.0 - values[:, 2])
    zeta = math.exp(chi) * (values[:, 0] + 1j * values[:, 1]) / denom
    modulus = np.abs(zeta) ** 2
    boosted = np.column_stack(
        [2 * zeta.real / (modulus + 1), 2 * zeta.imag / (modulus + 1), (modulus - 1) / (modulus + 1)]
    )
    boosted[at_north] = values[at_north]
    return boosted


def lorentz_boost(
    Q: SphereField, v: float, s: int = 1, blaschke: Optional[BlaschkeProduct] = None
) -> SolitonProfile:
    """Boost an equatorial half-harmonic map to (sqrt(1-v^2) f, sqrt(1-v^2) g, s v)."""
    _check_velocity(v)
    if np.max(np.abs(Q.values[:, 2])) > _PLANAR_TOLERANCE:
        raise DomainError("Lorentz boosts start from an equatorial map with zero third component.")
    alpha = math.sqrt(1.0 - v * v)
    values = np.column_stack([alpha * Q.values[:, 0], alpha * Q.values[:, 1], np.full(Q.grid.n_points, s * v)])
    values /= np.linalg.norm(values, axis=1, keepdims=True)
    logger.debug("Boosted a field on %d nodes to v=%s, s=%d", Q.grid.n_points, v, s)
    return SolitonProfile(blaschke, v, SphereField(values, Q.grid, Q.chart), sign=s)


def build_profile(
    B: BlaschkeProduct, v: float, grid: CircleGrid, rotation: Optional[np.ndarray] = None
) -> SolitonProfile:
    """Materialize R (sqrt(1-v^2) Re B, sqrt(1-v^2) s Im B, s v) on the grid."""
    _check_velocity(v)
    grid.require_pole_avoiding()
    rotation = np.eye(3) if rotation is None else np.asarray(rotation, dtype=float)
    boundary = blaschke_boundary_values(B, grid.theta)
    if B.sign < 0:
        boundary = np.conj(boundary)
    alpha = math.sqrt(1.0 - v * v)
    values = np.column_stack([alpha * boundary.real, alpha * boundary.imag, np.full(grid.n_points, B.sign * v)])
    values /= np.linalg.norm(values, axis=1, keepdims=True)
    values = values @ rotation.T
    return SolitonProfile(B, v, SphereField(values, grid, STEREOGRAPHIC_LINE), rotation, B.sign)


def random_blaschke(rng: np.random.Generator, m: int, sign: int = 1) -> BlaschkeProduct:
    return BlaschkeProduct(
        phase=float(rng.uniform(0.0, 2 * math.pi)),
        scales=tuple(rng.uniform(*SCALE_RANGE, size=m)),
        centers=tuple(rng.uniform(*CENTER_RANGE, size=m)),
        sign=sign,
    )


def energy_numeric(Q: SphereField) -> float:
    """E = 1/2 sum over components of 2 pi sum_k |k| |coeff(k)|^2.

    Warns with SpectralTailWarning when the top decade of frequencies carries
    more than 1e-8 of the energy.
    """
    coefficients = Q.component_coefficients()
    energy = 0.5 * sum(hdot_half_norm_squared(F) for F in coefficients)
    K = coefficients[0].K
    top = np.abs(coefficients[0].frequencies) > TAIL_FRACTION * K
    tail = 0.5 * sum(
        2 * math.pi * float(np.sum(np.abs(F.frequencies[top]) * np.abs(F.coeffs[top]) ** 2)) for F in coefficients
    )
    if energy > 0 and tail > TAIL_TOLERANCE * energy:
        message = (
            f"The top decade of frequencies carries {tail / energy:.3e} of the energy on a grid of "
            f"{Q.grid.n_points} points; refine the grid."
        )
        logger.warning(message)
        warnings.warn(message, SpectralTailWarning, stacklevel=2)
    logger.debug("Numeric energy on %d nodes: %.16e", Q.grid.n_points, energy)
    return energy


def energy_analytic(B: BlaschkeProduct, v: float) -> float:
    _check_velocity(v)
    return (1.0 - v * v) * math.pi * B.degree


def profile_rows(profile: SolitonProfile) -> list:
    """CSV rows (theta, x, q1, q2, q3); the grid never contains the point at infinity."""
    grid = profile.field.grid
    theta, x = grid.theta, grid.x
    return [
        [float(theta[j]), float(x[j])] + [float(q) for q in profile.field.values[j]] for j in range(grid.n_points)
    ]


def infinite_energy_solution(v: float, grid: CircleGrid, t: float = 0.0) -> SphereField:
    """Periodic traveling wave (sqrt(1-v^2) cos(x - vt), sqrt(1-v^2) sin(x - vt), v) on the torus."""
    _check_velocity(v)
    alpha = math.sqrt(1.0 - v * v)
    phase = grid.theta - v * t
    values = np.column_stack([alpha * np.cos(phase), alpha * np.sin(phase), np.full(grid.n_points, v)])
    values /= np.linalg.norm(values, axis=1, keepdims=True)
    return SphereField(values, grid, TORUS)

