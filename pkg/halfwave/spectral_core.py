"""Circle-based spectral primitives.

The real line is represented through its stereographic lift to the unit circle,
x = cos(theta) / (1 - sin(theta)), with the point at infinity sitting at
theta = pi/2. Functions on the circle are stored as Fourier coefficients

    coeff(k) = (1 / 2pi) * integral f(theta) exp(-i k theta) dtheta,

so that f = sum_k coeff(k) exp(i k theta).
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from halfwave.errors import PoleOnGrid

logger = logging.getLogger(__name__)

STEREOGRAPHIC_LINE = "stereographic-line"
TORUS = "torus"
CHARTS = (STEREOGRAPHIC_LINE, TORUS)

POLE_ANGLE = math.pi / 2
_POLE_TOLERANCE = 1e-12
_UNIT_NORM_TOLERANCE = 1e-12


class _PointAtInfinity:
    """Tagged image of theta = pi/2 under the stereographic projection."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"


INFINITY = _PointAtInfinity()

ExtendedReal = Union[float, _PointAtInfinity]


def is_infinity(x) -> bool:
    return x is INFINITY


def _distance_to_pole(theta):
    d = np.mod(np.asarray(theta, dtype=float) - POLE_ANGLE, 2 * math.pi)
    return np.minimum(d, 2 * math.pi - d)


@dataclass(frozen=True)
class CircleGrid:
    """Uniform angles theta_j = offset + 2 pi j / n on the unit circle.

    When no offset is given the grid is shifted by pi/n (or pi/2n when n is
    not a multiple of four) so that theta = pi/2 is never a node.
    """

    n_points: int
    offset: Optional[float] = None

    def __post_init__(self):
        if self.n_points < 8 or self.n_points % 2:
            raise ValueError(
                f"A circle grid needs an even number of points, at least 8. Got {self.n_points}."
            )
        if self.offset is None:
            shift = math.pi / self.n_points
            if self.n_points % 4:
                shift /= 2
            object.__setattr__(self, "offset", shift)

    @property
    def spacing(self) -> float:
        return 2 * math.pi / self.n_points

    @property
    def theta(self) -> np.ndarray:
        return self.offset + self.spacing * np.arange(self.n_points)

    @property
    def band_limit(self) -> int:
        return self.n_points // 2 - 1

    @property
    def pole_avoiding(self) -> bool:
        return bool(np.min(_distance_to_pole(self.theta)) > _POLE_TOLERANCE)

    def require_pole_avoiding(self):
        if not self.pole_avoiding:
            raise PoleOnGrid(
                f"The grid with {self.n_points} points and offset {self.offset} has a node at theta = pi/2."
            )

    @property
    def x(self) -> np.ndarray:
        """Line coordinates of the nodes. Requires a pole-avoiding grid."""
        return stereographic_project_array(self.theta)

    @property
    def weight(self) -> np.ndarray:
        """Samples of 1 - sin(theta), i.e. 2 / (1 + x^2)."""
        return 1.0 - np.sin(self.theta)


@dataclass(frozen=True, eq=False)
class FourierField:
    """Complex Fourier coefficients on the frequencies -K..K."""

    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if coeffs.ndim != 1 or coeffs.size % 2 == 0:
            raise ValueError("Fourier coefficients must be a 1-D array of odd length 2K+1.")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def K(self) -> int:
        return (self.coeffs.size - 1) // 2

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(-self.K, self.K + 1)

    @classmethod
    def zeros(cls, K: int) -> "FourierField":
        return cls(np.zeros(2 * K + 1, dtype=complex))

    @classmethod
    def from_mapping(cls, values: dict, K: int) -> "FourierField":
        coeffs = np.zeros(2 * K + 1, dtype=complex)
        for k, value in values.items():
            if abs(k) > K:
                raise ValueError(f"Frequency {k} lies outside the band -{K}..{K}.")
            coeffs[k + K] = value
        return cls(coeffs)

    @classmethod
    def delta(cls, k: int, K: int, value: complex = 1.0) -> "FourierField":
        return cls.from_mapping({k: value}, K)

    def coeff(self, k: int) -> complex:
        if abs(k) > self.K:
            return 0j
        return complex(self.coeffs[k + self.K])

    def pad(self, K: int) -> "FourierField":
        if K < self.K:
            raise ValueError(f"Cannot pad a band of {self.K} down to {K}; use restrict.")
        out = np.zeros(2 * K + 1, dtype=complex)
        out[K - self.K : K + self.K + 1] = self.coeffs
        return FourierField(out)

    def restrict(self, K: int) -> "FourierField":
        if K >= self.K:
            return self.pad(K)
        return FourierField(self.coeffs[self.K - K : self.K + K + 1].copy())

    def support_radius(self, tol: float = 0.0) -> int:
        """Largest |k| whose coefficient exceeds tol in modulus (-1 for zero)."""
        nonzero = np.nonzero(np.abs(self.coeffs) > tol)[0]
        if nonzero.size == 0:
            return -1
        return int(np.max(np.abs(nonzero - self.K)))

    def is_real(self, tol: float = 1e-12) -> bool:
        """True when the coefficients describe a real-valued function."""
        return bool(np.max(np.abs(self.coeffs - np.conj(self.coeffs[::-1])), initial=0.0) <= tol)

    def l2_norm(self) -> float:
        """Circle L^2 norm, sqrt(2 pi sum |c_k|^2)."""
        return math.sqrt(2 * math.pi * float(np.sum(np.abs(self.coeffs) ** 2)))

    def __add__(self, other: "FourierField") -> "FourierField":
        K = max(self.K, other.K)
        return FourierField(self.pad(K).coeffs + other.pad(K).coeffs)

    def __sub__(self, other: "FourierField") -> "FourierField":
        K = max(self.K, other.K)
        return FourierField(self.pad(K).coeffs - other.pad(K).coeffs)

    def scale(self, factor: complex) -> "FourierField":
        return FourierField(self.coeffs * factor)


@dataclass(frozen=True, eq=False)
class SphereField:
    """Unit 3-vectors sampled on a circle grid (line chart) or a torus grid."""

    values: np.ndarray
    grid: CircleGrid
    chart: str = STEREOGRAPHIC_LINE

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n_points, 3):
            raise ValueError(
                f"Expected sphere values of shape ({self.grid.n_points}, 3), got {values.shape}."
            )
        if self.chart not in CHARTS:
            raise ValueError(f"Unknown chart '{self.chart}'. Use one of {CHARTS}.")
        drift = np.max(np.abs(np.linalg.norm(values, axis=1) - 1.0))
        if drift > _UNIT_NORM_TOLERANCE:
            raise ValueError(f"Sphere field values are not unit vectors (max drift {drift:.3e}).")
        object.__setattr__(self, "values", values)

    def component_coefficients(self, K: Optional[int] = None) -> list:
        return [transform(self.values[:, c], self.grid, K) for c in range(3)]

    def is_constant(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.values - self.values[0])) <= tol)


def stereographic_project(theta: float) -> ExtendedReal:
    """Map an angle on the circle to the extended real line."""
    if float(_distance_to_pole(theta)) <= _POLE_TOLERANCE:
        return INFINITY
    return math.cos(theta) / (1.0 - math.sin(theta))


def stereographic_lift(x: ExtendedReal) -> float:
    """Inverse of stereographic_project with values in [0, 2 pi)."""
    if is_infinity(x):
        return POLE_ANGLE
    return math.atan2(x * x - 1.0, 2.0 * x) % (2 * math.pi)


def stereographic_project_array(theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if np.any(_distance_to_pole(theta) <= _POLE_TOLERANCE):
        raise PoleOnGrid("Cannot project theta = pi/2 to a finite line coordinate.")
    return np.cos(theta) / (1.0 - np.sin(theta))


def stereographic_lift_array(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.mod(np.arctan2(x * x - 1.0, 2.0 * x), 2 * math.pi)


def transform(samples, grid: CircleGrid, K: Optional[int] = None) -> FourierField:
    """Fourier coefficients of grid samples, band-limited to -K..K."""
    n = grid.n_points
    if K is None:
        K = grid.band_limit
    if K > n // 2 - 1:
        raise ValueError(f"Band limit {K} is too large for a grid of {n} points.")
    spectrum = np.fft.fft(np.asarray(samples, dtype=complex)) / n
    k = np.arange(-K, K + 1)
    return FourierField(spectrum[k % n] * np.exp(-1j * k * grid.offset))


def sample(F: FourierField, grid: CircleGrid, real: bool = False) -> np.ndarray:
    """Evaluate sum_k coeff(k) exp(i k theta_j) on the grid nodes."""
    n = grid.n_points
    if 2 * F.K + 1 > n:
        raise ValueError(f"A band of {F.K} cannot be sampled on {n} points without aliasing.")
    k = F.frequencies
    buffer = np.zeros(n, dtype=complex)
    np.add.at(buffer, k % n, F.coeffs * np.exp(1j * k * grid.offset))
    values = n * np.fft.ifft(buffer)
    return values.real if real else values


def halfwave_multiplier(F: FourierField) -> FourierField:
    """|nabla| on the circle: coeff(k) -> |k| coeff(k)."""
    return FourierField(np.abs(F.frequencies) * F.coeffs)


def hilbert_multiplier(F: FourierField) -> FourierField:
    """coeff(k) -> i sgn(k) coeff(k); the mean is annihilated."""
    return FourierField(1j * np.sign(F.frequencies) * F.coeffs)


def derivative_multiplier(F: FourierField) -> FourierField:
    return FourierField(1j * F.frequencies * F.coeffs)


@dataclass(frozen=True)
class LineSamples:
    x: np.ndarray
    values: np.ndarray


def pullback_halfwave(F: FourierField, grid: CircleGrid) -> LineSamples:
    """Line-side |nabla| phi at x_j, from the circle lift phi~ = F.

    Uses (|nabla| phi)(x) = (1 - sin theta) (|nabla|_{S^1} phi~)(theta).
    """
    grid.require_pole_avoiding()
    values = grid.weight * sample(halfwave_multiplier(F), grid)
    return LineSamples(grid.x, values)


def line_derivative(F: FourierField, grid: CircleGrid) -> np.ndarray:
    """Samples of d/dx phi, using d/dx = (1 - sin theta) d/dtheta."""
    return grid.weight * sample(derivative_multiplier(F), grid)


def circle_quadrature(samples, grid: CircleGrid, weighted: bool = False):
    """Trapezoid rule on the circle.

    With weighted=True the samples are divided by 1 - sin(theta) first, which
    turns the circle integral of a lift into the line integral dx.
    """
    samples = np.asarray(samples)
    if weighted:
        grid.require_pole_avoiding()
        samples = samples / grid.weight
    total = np.sum(samples) * grid.spacing
    return total if np.iscomplexobj(total) else float(total)


def hdot_half_norm_squared(F: FourierField) -> float:
    """Circle H^{1/2} seminorm squared, 2 pi sum |k| |coeff(k)|^2."""
    return 2 * math.pi * float(np.sum(np.abs(F.frequencies) * np.abs(F.coeffs) ** 2))


def line_double_integral_norm(phi: Callable[[np.ndarray], np.ndarray], n_points: int = 256) -> float:
    """(1 / 2 pi) double integral |phi(x) - phi(y)|^2 / |x - y|^2 dx dy over R x R.

    Evaluated by a tensor trapezoid rule in the line variables on two
    interleaved pole-avoiding grids, offset by h/2 and h/4.
    """
    if n_points % 4:
        raise ValueError("The double-integral quadrature needs a multiple of four points.")
    h = 2 * math.pi / n_points
    outer = CircleGrid(n_points, offset=h / 2)
    inner = CircleGrid(n_points, offset=h / 4)
    x, y = outer.x, inner.x
    fx, fy = np.asarray(phi(x)), np.asarray(phi(y))
    dx = h / outer.weight
    dy = h / inner.weight
    diff = np.abs(fx[:, None] - fy[None, :]) ** 2
    kernel = diff / (x[:, None] - y[None, :]) ** 2
    total = float(np.sum(kernel * dx[:, None] * dy[None, :]))
    logger.debug("Line double integral on %d x %d nodes: %.16e", n_points, n_points, total)
    return total / (2 * math.pi)


def torus_grid(n_points: int) -> CircleGrid:
    """Grid x_j = 2 pi j / n used for dynamics on the torus."""
    return CircleGrid(n_points, offset=0.0)
