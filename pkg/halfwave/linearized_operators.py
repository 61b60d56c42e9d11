"""Circle realizations of the linearized operators around Q_m.

On the line L+ = |nabla| - 2m/(1+x^2) and L- = L+ + R_m. Lifted to the circle
they become J = (1 - sin theta)(|nabla| - m) and H = (1 - sin theta)(|nabla| - m + R~_m),
which act on Fourier coefficients as tridiagonal (Jacobi) matrices. R~_m is
diagonal with the Funk-Hecke eigenvalues m - l for l < m and 0 otherwise.
"""

import logging
import math
from typing import Optional

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.special import eval_chebyt

from halfwave.errors import BandTooSmall, NotInRange
from halfwave.spectral_core import CircleGrid, FourierField, sample, transform
from halfwave.tridiagonal import TridiagonalOperator

logger = logging.getLogger(__name__)

OPERATORS = ("J", "H")
_DIAGONAL_GAP = 1e-6
_SQRT2 = math.sqrt(2.0)


def funk_hecke_eigenvalue(m: int, ell: int) -> float:
    ell = abs(int(ell))
    return float(m - ell) if ell < m else 0.0


def _check_which(which: str) -> str:
    aliases = {"J": "J", "+": "J", "plus": "J", "H": "H", "-": "H", "minus": "H"}
    if which not in aliases:
        raise ValueError(f"Unknown operator '{which}'. Use 'J' (L+) or 'H' (L-).")
    return aliases[which]


def diagonal_symbol(m: int, k, which: str = "J") -> np.ndarray:
    """|k| - m for J, |k| - m + lambda_|k| = max(|k| - m, 0) for H."""
    k = np.abs(np.asarray(k))
    if _check_which(which) == "J":
        return (k - m).astype(float)
    return np.maximum(k - m, 0).astype(float)


def multiply_by_weight(F: FourierField) -> FourierField:
    """Multiplication by 1 - sin(theta); the band grows by one."""
    G = F.pad(F.K + 1).coeffs
    out = G.copy()
    out[1:] += 0.5j * G[:-1]
    out[:-1] -= 0.5j * G[1:]
    return FourierField(out)


def _apply(m: int, F: FourierField, which: str, grid: Optional[CircleGrid]) -> FourierField:
    symbol = diagonal_symbol(m, F.frequencies, which)
    if grid is None:
        return multiply_by_weight(FourierField(symbol * F.coeffs))
    if 2 * (F.K + 1) + 1 > grid.n_points:
        raise BandTooSmall(f"A grid of {grid.n_points} points cannot carry the image of a band of {F.K}.")
    samples = grid.weight * sample(FourierField(symbol * F.coeffs), grid)
    return transform(samples, grid, F.K + 1)


def apply_Lplus(m: int, F: FourierField, grid: Optional[CircleGrid] = None) -> FourierField:
    """J F = (1 - sin theta)(|nabla| - m) F.

    Exact on coefficients by default. With a grid the product with the weight
    is formed on samples and transformed back, which agrees to rounding.
    """
    return _apply(m, F, "J", grid)


def apply_Lminus(m: int, F: FourierField, grid: Optional[CircleGrid] = None) -> FourierField:
    """H F = J F plus the diagonal Funk-Hecke action of R~_m."""
    return _apply(m, F, "H", grid)


def apply_on_line(m: int, values, grid: CircleGrid, which: str = "J") -> np.ndarray:
    """L+ or L- applied to line samples phi(x_j), returning samples at the same nodes.

    Pulled back to the circle the operator is (1 - sin theta)(|nabla| - m + R~).
    """
    grid.require_pole_avoiding()
    F = transform(values, grid)
    symbol = diagonal_symbol(m, F.frequencies, which)
    return grid.weight * sample(FourierField(symbol * F.coeffs), grid)


def quadratic_form_Lplus(F: FourierField, m: int) -> float:
    """(f, L+ f) on the line, 2 pi sum (|k| - m) |c_k|^2."""
    return 2 * math.pi * float(np.sum(diagonal_symbol(m, F.frequencies, "J") * np.abs(F.coeffs) ** 2))


def quadratic_form_Lminus(F: FourierField, m: int) -> float:
    """(g, L- g) on the line, 2 pi sum max(|k| - m, 0) |c_k|^2."""
    return 2 * math.pi * float(np.sum(diagonal_symbol(m, F.frequencies, "H") * np.abs(F.coeffs) ** 2))


def kernel_Km(m: int, theta, omega):
    """Circle kernel of R~_m, (1 - cos(m t)) / (2 pi (1 - cos t)) with t = theta - omega.

    Near the diagonal the quotient is replaced by the Chebyshev sum
    (m + 2 sum_{k<m} (m - k) T_k(cos t)) / (2 pi), whose value at t = 0 is m^2 / (2 pi).
    """
    t = np.asarray(theta, dtype=float) - np.asarray(omega, dtype=float)
    half = np.sin(t / 2) ** 2
    near = half < _DIAGONAL_GAP
    safe = np.where(near, 1.0, half)
    quotient = np.sin(m * t / 2) ** 2 / safe
    y = np.cos(t)
    series = np.full(t.shape, float(m))
    for k in range(1, m):
        series = series + 2.0 * (m - k) * eval_chebyt(k, y)
    value = np.where(near, series, quotient) / (2 * math.pi)
    return float(value) if value.ndim == 0 else value


def funk_hecke_quadrature(m: int, ell: int, n_points: int = 64) -> float:
    """Integral of K_m(0, omega) cos(l omega) by the trapezoid rule, exact for n > m + l."""
    omega = 2 * math.pi * np.arange(n_points) / n_points
    values = kernel_Km(m, 0.0, omega) * np.cos(ell * omega)
    return float(np.sum(values) * 2 * math.pi / n_points)


def jacobi_matrix(m: int, K: int, which: str = "J") -> TridiagonalOperator:
    """Matrix of J (or H) on frequencies -K..K.

    Row k holds d_k on the diagonal, (i/2) d_{k-1} below it and (-i/2) d_{k+1}
    above it, with d the diagonal symbol of the operator.
    """
    which = _check_which(which)
    if K < m + 2:
        raise BandTooSmall(f"The Jacobi matrix of degree {m} needs a band K >= {m + 2}, got K = {K}.")
    k = np.arange(-K, K + 1)
    d = diagonal_symbol(m, k, which)
    diag = d.astype(complex)
    upper = -0.5j * d[1:]
    lower = 0.5j * d[:-1]
    logger.debug("Built %s matrix for m=%d on band %d", which, m, K)
    return TridiagonalOperator(diag, upper, lower, start=-K)


def matrix_element_quadrature(m: int, k: int, l: int, which: str = "J", n_points: int = 64) -> complex:
    """<e_k, J e_l> (or H) from samples of the weight times the symbol, as a quadrature oracle."""
    grid = CircleGrid(n_points, offset=0.0)
    theta = grid.theta
    symbol = float(diagonal_symbol(m, l, which))
    samples = grid.weight * symbol * np.exp(1j * l * theta)
    return complex(np.sum(samples * np.exp(-1j * k * theta)) / n_points)


def matrix_json(m: int, K: int, which: str = "J") -> dict:
    payload = jacobi_matrix(m, K, which).to_json()
    payload.update({"m": m, "K": K, "which": _check_which(which)})
    return payload


# Isometric line coefficients.
#
# A line function f with lift f~ is written f~ = (e^{i theta} - i) / sqrt(2) * G(theta).
# The map A: G -> f~ is an isometry from l^2 (scaled by 2 pi) onto L^2(R), so
# operators that are self-adjoint on the line become Hermitian matrices in G.


def to_line_frame(F: FourierField, tol: float = 1e-12) -> FourierField:
    """Isometric coefficients G of a lift F that vanishes at theta = pi/2.

    Raises:
        NotInRange: when F does not vanish at the pole, i.e. the line
            function is not square integrable.
    """
    K = F.K
    quotient, remainder = P.polydiv(F.coeffs, np.array([-1j, 1.0]))
    residue = abs(complex(np.atleast_1d(remainder)[0]))
    scale = max(1.0, float(np.max(np.abs(F.coeffs), initial=0.0)))
    if residue > tol * scale:
        raise NotInRange(f"The lift does not vanish at the pole (value {residue:.3e}); it is not in L^2(R).")
    G = np.zeros(2 * K + 1, dtype=complex)
    G[: quotient.size] = _SQRT2 * quotient
    return FourierField(G)


def from_line_frame(G: FourierField) -> FourierField:
    """Lift f~ from isometric coefficients: (A G)_k = (G_{k-1} - i G_k) / sqrt(2)."""
    H = G.pad(G.K + 1).coeffs
    out = -1j * H
    out[1:] += H[:-1]
    return FourierField(out / _SQRT2)


def line_l2_norm(G: FourierField) -> float:
    return math.sqrt(2 * math.pi * float(np.sum(np.abs(G.coeffs) ** 2)))


def frame_operator(m: int, which: str = "J", K: int = 8) -> TridiagonalOperator:
    """A* D A for D the diagonal symbol: Hermitian tridiagonal matrix of L+ or L- in G.

    Entries are exact matrix elements, so truncating to -K..K is a compression.
    """
    k = np.arange(-K, K + 2)
    d = diagonal_symbol(m, k, which) if m > 0 else np.abs(k).astype(float)
    diag = 0.5 * (d[:-1] + d[1:])
    inner = d[1:-1]
    return TridiagonalOperator(diag.astype(complex), -0.5j * inner, 0.5j * inner, start=-K)
