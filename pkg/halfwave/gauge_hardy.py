"""Hardy splitting, Darboux factorization and the gauge transform U.

On the line, L+ f = Q_m D Q_m^-1 f_+ + conj(Q_m) D* Q_m f_- with D = -i d/dx,
and U f = Q_m f_+ + conj(Q_m) f_- conjugates both L+ and L- to |nabla| on the
orthocomplement of the bound states.

The gauge operations act on isometric line coefficients G (see
linearized_operators.to_line_frame). In these coordinates the line Hardy
projection keeps k >= 0, multiplication by Q_m is a shift by m and the bound
states span e_k for -m <= k <= m-1.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from halfwave.eigensolver import SpectrumReport, point_spectrum_Lplus
from halfwave.errors import BandTooSmall, NotInRange
from halfwave.linearized_operators import (
    diagonal_symbol,
    frame_operator,
    multiply_by_weight,
    to_line_frame,
)
from halfwave.spectral_core import CircleGrid, FourierField, derivative_multiplier, sample, transform

logger = logging.getLogger(__name__)

JOST_WINDOW_RADIUS = 2.0


def hardy_project(F: FourierField, sign: str = "+") -> FourierField:
    """Pi_+ keeps k >= 0, Pi_- keeps k < 0; Pi_+ + Pi_- = id."""
    if sign not in ("+", "-"):
        raise ValueError(f"The Hardy sign must be '+' or '-', got '{sign}'.")
    keep = F.frequencies >= 0 if sign == "+" else F.frequencies < 0
    return FourierField(np.where(keep, F.coeffs, 0.0))


def _shift(F: FourierField, s: int) -> FourierField:
    """Multiplication by exp(i s theta); the band grows by |s|."""
    K = F.K + abs(s)
    out = np.zeros(2 * K + 1, dtype=complex)
    out[K - F.K + s : K + F.K + 1 + s] = F.coeffs
    return FourierField(out)


def _require_margin(F: FourierField, margin: int):
    radius = F.support_radius()
    if radius > F.K - margin:
        raise BandTooSmall(
            f"The input occupies frequencies up to {radius} in a band of {F.K}; a margin of {margin} is needed."
        )


def darboux_apply(m: int, F: FourierField, weighted: bool = False) -> FourierField:
    """exp(i m theta)(-i d/dtheta)exp(-i m theta) F_+ + exp(-i m theta)(i d/dtheta)exp(i m theta) F_-.

    This is (|nabla| - m) F. With weighted=True the result is multiplied by
    1 - sin(theta), which is the circle form of L+.
    """
    _require_margin(F, m + 1)
    plus = _shift(derivative_multiplier(_shift(hardy_project(F, "+"), -m)).scale(-1j), m)
    minus = _shift(derivative_multiplier(_shift(hardy_project(F, "-"), m)).scale(1j), -m)
    result = (plus + minus).restrict(F.K)
    if weighted:
        return multiply_by_weight(result)
    return result


def gauge_forward(m: int, G: FourierField) -> FourierField:
    """U on isometric coefficients: k >= 0 moves to k + m, k < 0 to k - m."""
    K = G.K + m
    out = np.zeros(2 * K + 1, dtype=complex)
    k = G.frequencies
    target = np.where(k >= 0, k + m, k - m)
    out[target + K] = G.coeffs
    return FourierField(out)


def bound_overlap(m: int, G: FourierField) -> float:
    """Line L^2 norm of the component of G in the bound-state span."""
    k = G.frequencies
    inside = (k >= -m) & (k <= m - 1)
    return math.sqrt(2 * math.pi * float(np.sum(np.abs(G.coeffs[inside]) ** 2)))


def gauge_adjoint(m: int, H: FourierField, tol: float = 1e-8) -> FourierField:
    """U* on isometric coefficients.

    Raises:
        NotInRange: when H overlaps the bound states by more than tol.
    """
    overlap = bound_overlap(m, H)
    if overlap > tol:
        raise NotInRange(f"The input has a bound-state component of size {overlap:.3e} (tolerance {tol}).")
    return _unshift(m, H)


def _unshift(m: int, H: FourierField) -> FourierField:
    if H.K <= m:
        raise BandTooSmall(f"A band of {H.K} leaves nothing after removing the {m} bound frequencies.")
    K = H.K - m
    k = H.frequencies
    out = np.zeros(2 * K + 1, dtype=complex)
    upper = k >= m
    lower = k <= -m - 1
    out[k[upper] - m + K] = H.coeffs[upper]
    out[k[lower] + m + K] = H.coeffs[lower]
    return FourierField(out)


@dataclass(frozen=True, eq=False)
class BoundProjector:
    """Orthogonal projector onto span{phi_0..phi_{2m-1}} in isometric coefficients on -K..K.

    basis holds the coefficient vectors, orthonormal in the Euclidean inner product.
    """

    m: int
    K: int
    basis: np.ndarray

    @classmethod
    def from_spectrum(cls, report: SpectrumReport, K: Optional[int] = None) -> "BoundProjector":
        m = report.m
        K = m + 1 if K is None else K
        if K < m:
            raise BandTooSmall(f"The projector needs a band K >= {m}, got {K}.")
        rows = []
        for u in report.eigenvectors:
            G = to_line_frame(FourierField(u)).pad(K)
            rows.append(math.sqrt(2 * math.pi) * G.coeffs)
        return cls(m, K, np.array(rows))

    @classmethod
    def for_degree(cls, m: int, K: Optional[int] = None) -> "BoundProjector":
        return cls.from_spectrum(point_spectrum_Lplus(m), K)

    def matrix(self) -> np.ndarray:
        return self.basis.T @ np.conj(self.basis)

    def apply(self, G: FourierField) -> FourierField:
        if G.K > self.K:
            raise BandTooSmall(f"The projector was built on a band of {self.K}, got {G.K}.")
        return FourierField(self.matrix() @ G.pad(self.K).coeffs)

    def defect(self) -> float:
        """max(|P^2 - P|, |P - P*|) entrywise."""
        P = self.matrix()
        return float(max(np.max(np.abs(P @ P - P)), np.max(np.abs(P - P.conj().T))))


def verify_unitary_equivalence(m: int, G: FourierField) -> float:
    """max over L+ and L- of the line L^2 norm of U* L U G - |nabla| G.

    G holds isometric coefficients and needs a free margin of m + 2 frequencies.
    """
    _require_margin(G, m + 2)
    big = G.K + m + 2
    UG = gauge_forward(m, G).pad(big)
    free = frame_operator(0, "J", big).matvec(G.pad(big).coeffs)
    residual = 0.0
    for which in ("J", "H"):
        image = FourierField(frame_operator(m, which, big).matvec(UG.coeffs))
        pulled = _unshift(m, image).pad(big)
        diff = pulled.coeffs - free
        residual = max(residual, math.sqrt(2 * math.pi * float(np.sum(np.abs(diff) ** 2))))
    logger.debug("Unitary-equivalence residual for m=%d: %.3e", m, residual)
    return residual


def jost_function(m: int, E: float, L: float, grid: CircleGrid, sign: int = 1) -> np.ndarray:
    """Samples of exp(-(x/L)^2) Q_m^sign exp(i sign E x) on the lift, Q_m lifting to exp(i m theta)."""
    grid.require_pole_avoiding()
    x = grid.x
    window = np.exp(-((x / L) ** 2))
    return window * np.exp(1j * sign * (m * grid.theta + E * x))


def jost_residual(m: int, E: float, L: float, n_points: int = 8192, sign: int = 1) -> float:
    """sup over |x| <= 2 of |(L+ - E) phi| for the windowed Jost function phi.

    Decreases as the window L grows since L+ (Q_m exp(iEx)) = E Q_m exp(iEx).
    """
    grid = CircleGrid(n_points)
    values = jost_function(m, E, L, grid, sign)
    F = transform(values, grid)
    symbol = diagonal_symbol(m, F.frequencies, "J")
    image = grid.weight * sample(FourierField(symbol * F.coeffs), grid)
    near = np.abs(grid.x) <= JOST_WINDOW_RADIUS
    residual = float(np.max(np.abs(image[near] - E * values[near])))
    logger.debug("Jost residual m=%d E=%s L=%s: %.3e", m, E, L, residual)
    return residual
