"""Residual checks of the identities satisfied by solitons and their linearization."""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from halfwave.eigensolver import point_spectrum_Lplus, zero_modes
from halfwave.errors import BandTooSmall, ConstraintRankDeficient, VelocityZero
from halfwave.linearized_operators import diagonal_symbol, quadratic_form_Lminus, quadratic_form_Lplus
from halfwave.soliton_factory import SolitonProfile, energy_numeric, pure_power_map
from halfwave.spectral_core import (
    TORUS,
    CircleGrid,
    FourierField,
    SphereField,
    circle_quadrature,
    derivative_multiplier,
    halfwave_multiplier,
    sample,
    torus_grid,
)

logger = logging.getLogger(__name__)

HESSIAN_EPSILONS = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3)
_ROW_CHUNK = 256


@dataclass(frozen=True)
class ResidualReport:
    """Residuals of one identity on a sequence of grids.

    order is the observed algebraic rate between the last two grids, or None
    when it cannot be estimated.
    """

    name: str
    grids: List[int]
    residuals: List[float]
    details: dict = field(default_factory=dict)

    @property
    def order(self) -> Optional[float]:
        if len(self.grids) < 2:
            return None
        r0, r1 = self.residuals[-2], self.residuals[-1]
        if r0 <= 0 or r1 <= 0:
            return None
        return math.log(r0 / r1) / math.log(self.grids[-1] / self.grids[-2])

    @property
    def worst(self) -> float:
        return max(self.residuals)

    def to_dict(self) -> dict:
        return {"name": self.name, "grids": list(self.grids), "residuals": list(self.residuals), "order": self.order}


def _line_derivatives(Q: SphereField) -> Tuple[np.ndarray, np.ndarray]:
    """Samples of d/dx Q and |nabla| Q on the line, one column per component."""
    grid = Q.grid
    grid.require_pole_avoiding()
    dQ = np.empty_like(Q.values)
    hQ = np.empty_like(Q.values)
    for c, F in enumerate(Q.component_coefficients()):
        dQ[:, c] = grid.weight * sample(derivative_multiplier(F), grid, real=True)
        hQ[:, c] = grid.weight * sample(halfwave_multiplier(F), grid, real=True)
    return dQ, hQ


def _profile_residuals(Q: SphereField, v: float) -> Tuple[float, float]:
    dQ, hQ = _line_derivatives(Q)
    equation = np.cross(Q.values, hQ) - v * dQ
    alpha = math.sqrt(1.0 - v * v)
    speed = np.linalg.norm(dQ, axis=1, keepdims=True)
    pointwise = hQ - (alpha * speed * Q.values - v * np.cross(Q.values, dQ))
    return float(np.max(np.abs(equation))), float(np.max(np.abs(pointwise)))


def profile_residual(S: SolitonProfile, grid_sizes: Optional[Sequence[int]] = None) -> ResidualReport:
    """Sup norms of Q ^ |nabla|Q - v Q' and of |nabla|Q - (sqrt(1-v^2)|Q'| Q - v Q ^ Q').

    Args:
        S: the profile; Blaschke-built profiles are re-materialized on each grid.
        grid_sizes: grid sizes to check, defaulting to the profile's own grid.

    Returns:
        A ResidualReport holding the larger of the two residuals per grid.
    """
    grid_sizes = [S.field.grid.n_points] if grid_sizes is None else list(grid_sizes)
    residuals, equation, pointwise = [], [], []
    for n in grid_sizes:
        profile = S if n == S.field.grid.n_points else S.on_grid(CircleGrid(n))
        r_eq, r_pt = _profile_residuals(profile.field, S.velocity)
        equation.append(r_eq)
        pointwise.append(r_pt)
        residuals.append(max(r_eq, r_pt))
        logger.debug("Profile residual on %d nodes: equation %.3e, pointwise %.3e", n, r_eq, r_pt)
    return ResidualReport("profile", grid_sizes, residuals, {"equation": equation, "pointwise": pointwise})


def conformality_check(Q: SphereField) -> ResidualReport:
    """sup | |Q'| - ||nabla|Q| | and sup |Q' . |nabla|Q| for an equatorial half-harmonic map."""
    dQ, hQ = _line_derivatives(Q)
    lengths = float(np.max(np.abs(np.linalg.norm(dQ, axis=1) - np.linalg.norm(hQ, axis=1))))
    orthogonality = float(np.max(np.abs(np.sum(dQ * hQ, axis=1))))
    return ResidualReport(
        "conformality",
        [Q.grid.n_points],
        [max(lengths, orthogonality)],
        {"lengths": lengths, "orthogonality": orthogonality},
    )


def rigidity_check(Q: SphereField) -> ResidualReport:
    """Compare Q . |nabla|Q with (1/2pi) integral |Q(x) - Q(y)|^2 / |x - y|^2 dy.

    The integral is evaluated on the circle, where it reads
    (1 - sin theta)(1/2pi) integral |Q~(theta) - Q~(omega)|^2 / |e^{i theta} - e^{i omega}|^2 domega,
    with the removable diagonal value |dQ~/dtheta|^2.
    """
    grid = Q.grid
    grid.require_pole_avoiding()
    theta = grid.theta
    coefficients = Q.component_coefficients()
    multiplier = np.zeros(grid.n_points)
    tangent = np.zeros(grid.n_points)
    for c, F in enumerate(coefficients):
        multiplier += Q.values[:, c] * sample(halfwave_multiplier(F), grid, real=True)
        tangent += sample(derivative_multiplier(F), grid, real=True) ** 2
    multiplier *= grid.weight

    integral = np.empty(grid.n_points)
    for start in range(0, grid.n_points, _ROW_CHUNK):
        rows = slice(start, min(start + _ROW_CHUNK, grid.n_points))
        diff = np.sum((Q.values[rows, None, :] - Q.values[None, :, :]) ** 2, axis=2)
        chord = 2.0 - 2.0 * np.cos(theta[rows, None] - theta[None, :])
        on_diagonal = chord < 1e-300
        quotient = np.where(on_diagonal, 0.0, diff / np.where(on_diagonal, 1.0, chord))
        local = np.arange(rows.start, rows.stop)
        quotient[local - rows.start, local] = tangent[local]
        integral[rows] = np.sum(quotient, axis=1) * grid.spacing / (2 * math.pi)
    integral *= grid.weight

    residual = float(np.max(np.abs(multiplier - integral)))
    minimum = float(np.min(multiplier / grid.weight))
    positive = bool(Q.is_constant() or minimum > 0)
    return ResidualReport(
        "rigidity", [grid.n_points], [residual], {"positive": positive, "minimum": minimum}
    )


@dataclass(frozen=True)
class PohozaevReport:
    dirichlet: float
    cross: float
    slack: float
    identity_residual: float

    def to_dict(self) -> dict:
        return {
            "dirichlet": self.dirichlet,
            "cross": self.cross,
            "slack": self.slack,
            "identity_residual": self.identity_residual,
        }


def _torus_coefficients(u: SphereField, K: Optional[int]) -> np.ndarray:
    """(2K+1, 3) array of Fourier coefficients of a periodic field."""
    K = u.grid.band_limit if K is None else K
    return np.column_stack([F.coeffs for F in u.component_coefficients(K)])


def pohozaev_check(u: SphereField, v: float, K: Optional[int] = None) -> PohozaevReport:
    """Both sides of the Pohozaev identity for a periodic field traveling at speed v.

    The harmonic extension of u to the half-cylinder has Dirichlet energy
    2 pi sum |k| |u_k|^2. The other side is 2/v times the integral of
    (U ^ dU/dx) . dU/dy over the half-cylinder, a triple sum over
    k1 + k2 + k3 = 0 with the y-integral weight 1 / (|k1| + |k2| + |k3|).

    Raises:
        VelocityZero: when v = 0.
    """
    if v == 0:
        raise VelocityZero("The Pohozaev identity divides by the velocity; v = 0 is not allowed.")
    if u.chart != TORUS:
        raise ValueError("The Pohozaev identity is evaluated on periodic (torus) fields.")
    coeffs = _torus_coefficients(u, K)
    K = (coeffs.shape[0] - 1) // 2
    k = np.arange(-K, K + 1)

    dirichlet = 2 * math.pi * float(np.sum(np.abs(k)[:, None] * np.abs(coeffs) ** 2))

    a = k[:, None]
    b = k[None, :]
    c = -(a + b)
    valid = np.abs(c) <= K
    c_index = np.where(valid, c + K, 0)
    Qa = coeffs[:, None, :]
    Qb = coeffs[None, :, :]
    Qc = coeffs[c_index]
    determinant = np.sum(Qa * np.cross(Qb, Qc), axis=2)
    total = np.abs(a) + np.abs(b) + np.abs(c)
    weight = np.where(valid & (total > 0), (1j * b) * (-np.abs(c)) / np.where(total > 0, total, 1), 0.0)
    integral = 2 * math.pi * complex(np.sum(determinant * weight))
    cross = float((2.0 / v) * integral.real)

    slack = dirichlet - 2.0 * abs(integral.real)
    report = PohozaevReport(dirichlet, cross, slack, dirichlet - cross)
    logger.debug("Pohozaev check at v=%s: %s", v, report)
    return report


def pohozaev_three_mode_residual(c: float, v: float, n_points: int = 16) -> float:
    """Identity residual for the family (sqrt(1-c^2) cos x, sqrt(1-c^2) sin x, c)."""
    grid = torus_grid(n_points)
    r = math.sqrt(max(0.0, 1.0 - c * c))
    values = np.column_stack([r * np.cos(grid.theta), r * np.sin(grid.theta), np.full(n_points, c)])
    return pohozaev_check(SphereField(values, grid, TORUS), v).identity_residual


@dataclass(frozen=True)
class AreaLengthReport:
    two_area: float
    scaled_length: float
    energy: float
    lower_bound_holds: bool

    def to_dict(self) -> dict:
        return {
            "two_area": self.two_area,
            "scaled_length": self.scaled_length,
            "energy": self.energy,
            "lower_bound_holds": self.lower_bound_holds,
        }


def energy_lower_bound_holds(profile: SolitonProfile, tol: float = 1e-8) -> bool:
    """E >= (1 - v^2) pi for nonconstant profiles."""
    if profile.field.is_constant():
        return True
    return energy_numeric(profile.field) >= (1.0 - profile.velocity**2) * math.pi - tol


def area_length_check(S: SolitonProfile) -> AreaLengthReport:
    """(2A, sqrt(1-v^2) L) with A the energy and L the length of the boundary curve."""
    Q = S.field
    grid = Q.grid
    speed = np.zeros(grid.n_points)
    for F in Q.component_coefficients():
        speed += sample(derivative_multiplier(F), grid, real=True) ** 2
    length = circle_quadrature(np.sqrt(speed), grid)
    energy = energy_numeric(Q)
    return AreaLengthReport(
        two_area=2.0 * energy,
        scaled_length=math.sqrt(1.0 - S.velocity**2) * length,
        energy=energy,
        lower_bound_holds=energy_lower_bound_holds(S),
    )


@dataclass(frozen=True)
class HessianReport:
    epsilons: List[float]
    remainders: List[float]
    quadratic_form: float
    exponent: float

    def to_dict(self) -> dict:
        return {
            "epsilons": list(self.epsilons),
            "remainders": list(self.remainders),
            "quadratic_form": self.quadratic_form,
            "exponent": self.exponent,
        }


def hessian_check(
    m: int,
    h1: FourierField,
    h2: FourierField,
    epsilons: Sequence[float] = HESSIAN_EPSILONS,
    n_points: int = 256,
) -> HessianReport:
    """Remainder of the second-order energy expansion around Q_m.

    The perturbation is u = sqrt(1 - eps^2 (h1^2 + h2^2)) Q + eps (h1 e + h2 Q ^ e)
    with e the north pole; its second variation is (h1, L+ h1) + (h2, L- h2).
    h1 and h2 are circle lifts of real functions.
    """
    grid = CircleGrid(n_points)
    Q = pure_power_map(m, grid)
    e = np.array([0.0, 0.0, 1.0])
    Je = np.cross(Q.values, e)
    a = sample(h1, grid, real=True)
    b = sample(h2, grid, real=True)
    base = energy_numeric(Q)
    form = quadratic_form_Lplus(h1, m) + quadratic_form_Lminus(h2, m)

    remainders = []
    for eps in epsilons:
        tangent = eps * (a[:, None] * e + b[:, None] * Je)
        radial = np.sqrt(1.0 - eps**2 * (a**2 + b**2))
        values = radial[:, None] * Q.values + tangent
        values /= np.linalg.norm(values, axis=1, keepdims=True)
        energy = energy_numeric(SphereField(values, grid, Q.chart))
        remainders.append(abs(energy - base - 0.5 * eps**2 * form))
    exponent = float(np.polyfit(np.log(epsilons), np.log(remainders), 1)[0])
    logger.debug("Hessian remainders for m=%d: %s (exponent %.3f)", m, remainders, exponent)
    return HessianReport(list(epsilons), remainders, form, exponent)


def _constraint_rows(m: int, K: int) -> np.ndarray:
    """Linear functionals f -> (psi_j, f) on circle coefficients over -K..K.

    For the negative eigenfunctions psi_j = phi_j, paired through
    phi~_j / (1 - sin theta) = E_j^-1 (|nabla| - m) phi~_j. The zero mode and the
    resonance carry the weight (1 + x^2)^-1, which on the circle is a factor 1/2.
    """
    report = point_spectrum_Lplus(m)
    k = np.arange(-K, K + 1)
    rows = []
    for E, u in zip(report.eigenvalues[:-1], report.eigenvectors[:-1]):
        w = FourierField(u).pad(K).coeffs * diagonal_symbol(m, k, "J") / E
        rows.append(2 * math.pi * np.conj(w))
    for mode in zero_modes(m):
        rows.append(math.pi * np.conj(mode.pad(K).coeffs))
    return np.array(rows)


def _pole_row(K: int) -> np.ndarray:
    """f~(pi/2) = sum c_k i^k; vanishing at the pole keeps f square integrable."""
    return (1j) ** np.arange(-K, K + 1)


def _rayleigh(m: int, K: int, constrained: bool) -> Tuple[float, np.ndarray]:
    if K < m + 3:
        raise BandTooSmall(f"The Rayleigh problem needs K >= {m + 3}, got K = {K}.")
    k = np.arange(-K, K + 1)
    rows = _constraint_rows(m, K) if constrained else _pole_row(K)[None, :]
    expected_rank = 2 * m + 1 if constrained else 1
    rank = int(np.linalg.matrix_rank(rows))
    if rank < expected_rank:
        raise ConstraintRankDeficient(f"The constraints have rank {rank}, expected {expected_rank}.")
    Z = linalg.null_space(linalg.block_diag(rows, rows))
    numerator = np.diag(2 * math.pi * np.concatenate([diagonal_symbol(m, k, "J"), diagonal_symbol(m, k, "H")]))
    denominator = np.diag(2 * math.pi * np.concatenate([np.abs(k), np.abs(k)]).astype(float))
    values, vectors = linalg.eigh(Z.conj().T @ numerator @ Z, Z.conj().T @ denominator @ Z)
    logger.debug("Rayleigh minimum for m=%d, K=%d (constrained=%s): %.12f", m, K, constrained, values[0])
    return float(values[0]), Z @ vectors[:, 0]


def coercivity_rayleigh(m: int, K: int, constrained: bool = True) -> float:
    """Minimum of [(f, L+ f) + (g, L- g)] / (|f|^2 + |g|^2) in the homogeneous H^{1/2} norm.

    With constrained=True, f and g are each orthogonal to psi_0..psi_{2m}; the
    minimum is 1/(m+1). Otherwise only square integrability is imposed and the
    minimum is negative.

    Raises:
        ConstraintRankDeficient: when the constraint rows are linearly dependent.
    """
    return _rayleigh(m, K, constrained)[0]


def coercivity_minimizer(m: int, K: int) -> Tuple[FourierField, FourierField]:
    """(f, g) attaining the constrained minimum, as circle coefficients."""
    _, vector = _rayleigh(m, K, True)
    size = 2 * K + 1
    return FourierField(vector[:size]), FourierField(vector[size:])
