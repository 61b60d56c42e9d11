"""Point spectrum of L+ and the kernels of L+ and L- around Q_m.

The negative eigenvalues of L+ are the eigenvalues of the (2m-1)x(2m-1) central
block M^(m) of the Jacobi matrix J, that is the frequencies |k| <= m-1. The block
is similar to a real symmetric tridiagonal matrix, which is diagonalized with the
implicit QL method. Each eigenvector is completed at k = -m and k = m from the
neighbouring rows of J. The eigenvalue 0 belongs to the square-integrable zero
mode (f_m for odd m, g_m for even m).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, NamedTuple, Tuple

import numpy as np

from halfwave.errors import SimplicityViolation, StructureMismatch, ZeroOffdiagonal
from halfwave.linearized_operators import (
    apply_Lminus,
    apply_Lplus,
    frame_operator,
    to_line_frame,
)
from halfwave.spectral_core import CircleGrid, FourierField, circle_quadrature, sample
from halfwave.tridiagonal import TridiagonalOperator, implicit_ql

logger = logging.getLogger(__name__)

SIMPLICITY_GAP = 1e-9
_ZERO_COEFF = 1e-12

# cos(k pi / 2) and sin(k pi / 2) indexed by k mod 4
_A_TABLE = (1.0, 0.0, -1.0, 0.0)
_B_TABLE = (0.0, 1.0, 0.0, -1.0)


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    m: int
    eigenvalues: np.ndarray
    multiplicities: List[int]
    eigenvectors: List[np.ndarray]
    residuals: List[float]
    solver: dict = field(default_factory=dict)

    def eigenfunction(self, j: int) -> FourierField:
        """Circle coefficients of phi_j over k = -m..m."""
        return FourierField(self.eigenvectors[j])

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "eigenvalues": [float(E) for E in self.eigenvalues],
            "multiplicities": list(self.multiplicities),
            "residuals": [float(r) for r in self.residuals],
            "vectors": [[[float(c.real), float(c.imag)] for c in u] for u in self.eigenvectors],
            "solver": dict(self.solver),
        }


def alpha_sequence(m: int) -> np.ndarray:
    """Diagonal of M^(m): -n for n <= m-1 and n - 2m for m <= n <= 2m-1."""
    n = np.arange(1, 2 * m)
    return np.where(n <= m - 1, -n, n - 2 * m).astype(float)


def beta_sequence(m: int) -> np.ndarray:
    """beta_n = (i/2) n for n <= m-1 and (i/2)(2m - n) for n >= m, n = 1..2m-1."""
    n = np.arange(1, 2 * m)
    return 0.5j * np.where(n <= m - 1, n, 2 * m - n)


def build_Mm(m: int) -> TridiagonalOperator:
    """Central block of J on k = -(m-1)..(m-1).

    Super-diagonal entries are beta_{2m-2}, ..., beta_1 read from the top row
    down; the sub-diagonal holds -beta_1, ..., -beta_{2m-2}.
    """
    if m < 1:
        raise ValueError(f"The Jacobi block needs m >= 1, got {m}.")
    beta = beta_sequence(m)
    size = 2 * m - 1
    upper = np.array([beta[size - 1 - n] for n in range(1, size)], dtype=complex)
    lower = np.array([-beta[n - 1] for n in range(1, size)], dtype=complex)
    return TridiagonalOperator(alpha_sequence(m).astype(complex), upper, lower, start=-(m - 1))


def _similarity(M: TridiagonalOperator) -> Tuple[np.ndarray, np.ndarray]:
    """Off-diagonals gamma of the symmetric form and the diagonal scaling d with T = D M D^-1."""
    products = M.upper * M.lower
    if np.any(np.abs(products) == 0):
        n = int(np.argmin(np.abs(products))) + 1
        raise ZeroOffdiagonal(f"Off-diagonal pair {n} of the tridiagonal matrix vanishes.")
    if np.max(np.abs(products.imag)) > 1e-14 * np.max(np.abs(products)) or np.any(products.real < 0):
        raise ValueError("Only tridiagonal matrices with positive off-diagonal products can be symmetrized.")
    if np.max(np.abs(np.imag(M.diag)), initial=0.0) > 0:
        raise ValueError("The diagonal must be real to symmetrize.")
    signs = np.array([(-1.0) ** (n + 1) for n in range(1, products.size + 1)])
    gamma = signs * np.sqrt(np.abs(products))
    d = np.ones(M.size, dtype=complex)
    for n in range(products.size):
        d[n + 1] = d[n] * M.upper[n] / gamma[n]
    return gamma, d


def symmetrize(M: TridiagonalOperator) -> TridiagonalOperator:
    """Real symmetric tridiagonal matrix with the spectrum of M.

    The off-diagonals are gamma_n = (-1)^(n+1) sqrt(super_n sub_n).

    Raises:
        ZeroOffdiagonal: when some super_n sub_n vanishes.
    """
    if M.size == 1:
        return TridiagonalOperator(np.real(M.diag), [], [], M.start)
    gamma, _ = _similarity(M)
    return TridiagonalOperator(np.real(M.diag).astype(float), gamma, gamma.copy(), M.start)


def _real_phase(u: np.ndarray) -> np.ndarray:
    """Rotate coefficients over -m..m so the function is real, then fix the sign."""
    m = (u.size - 1) // 2
    weights = [abs(u[m + k]) * abs(u[m - k]) for k in range(m + 1)]
    k = int(np.argmax(weights))
    ratio = np.conj(u[m - k]) / u[m + k]
    phase = np.sqrt(ratio)
    u = u * phase / abs(phase)
    scale = np.max(np.abs(u))
    for c in u:
        if abs(c.real) > _ZERO_COEFF * scale:
            return u if c.real > 0 else -u
    for c in u:
        if abs(c.imag) > _ZERO_COEFF * scale:
            return u if c.imag > 0 else -u
    return u


def _line_norm(u: np.ndarray) -> float:
    m = (u.size - 1) // 2
    grid = CircleGrid(max(16, 4 * (m + 2)))
    values = sample(FourierField(u), grid)
    return math.sqrt(circle_quadrature(np.abs(values) ** 2, grid, weighted=True))


def _normalize(u: np.ndarray) -> np.ndarray:
    u = _real_phase(np.asarray(u, dtype=complex))
    return u / _line_norm(u)


class ZeroModes(NamedTuple):
    eigenfunction: FourierField
    resonance: FourierField


def zero_modes(m: int) -> ZeroModes:
    """(square-integrable zero mode, resonance) of L+, as circle coefficients over -m..m.

    The zero mode vanishing at the pole is f_m = cos(m theta) for odd m and
    g_m = sin(m theta) for even m; the other one is the resonance.
    """
    if m < 1:
        raise ValueError(f"Zero modes need m >= 1, got {m}.")
    f_m = FourierField.from_mapping({m: 0.5, -m: 0.5}, m)
    g_m = FourierField.from_mapping({m: -0.5j, -m: 0.5j}, m)
    if m % 2:
        return ZeroModes(f_m, g_m)
    return ZeroModes(g_m, f_m)


def kernel_constants(k: int) -> Tuple[float, float]:
    """(A_k, B_k) = (cos(k pi/2), sin(k pi/2)), the values of f_k and g_k at infinity."""
    return _A_TABLE[k % 4], _B_TABLE[k % 4]


def kernel_basis_Lminus(m: int) -> List[FourierField]:
    """f_k - A_k and g_k - B_k for k = 1..m, each vanishing at the pole."""
    basis = []
    for k in range(1, m + 1):
        A, B = kernel_constants(k)
        basis.append(FourierField.from_mapping({k: 0.5, -k: 0.5, 0: -A}, m))
        basis.append(FourierField.from_mapping({k: -0.5j, -k: 0.5j, 0: -B}, m))
    return basis


def point_spectrum_Lplus(m: int, tol: float = 1e-10) -> SpectrumReport:
    """Eigenvalues E_0 < ... < E_{2m-2} < E_{2m-1} = 0 of L+ and their eigenfunctions.

    Raises:
        SimplicityViolation: when two eigenvalues are closer than 1e-9.
    """
    M = build_Mm(m)
    if M.size > 1:
        T = symmetrize(M)
        _, scaling = _similarity(M)
        values, W = implicit_ql(T.diag, T.upper)
    else:
        values, W, scaling = np.real(M.diag), np.eye(1), np.ones(1)

    vectors = []
    for j, E in enumerate(values):
        v = W[:, j] / scaling
        u = np.zeros(2 * m + 1, dtype=complex)
        u[1:-1] = v
        u[0] = 1j * v[0] / (2 * E)
        u[-1] = -1j * v[-1] / (2 * E)
        vectors.append(_normalize(u))

    zero = zero_modes(m).eigenfunction
    vectors.append(_normalize(zero.coeffs))
    eigenvalues = np.append(values, 0.0)
    gaps = np.diff(eigenvalues)
    if gaps.size and np.min(gaps) < SIMPLICITY_GAP:
        raise SimplicityViolation(f"Eigenvalues of L+ for m={m} are not simple (min gap {np.min(gaps):.3e}).")

    residuals = []
    for E, u in zip(eigenvalues, vectors):
        image = apply_Lplus(m, FourierField(u))
        defect = image - FourierField(u).scale(E)
        residuals.append(float(np.linalg.norm(defect.coeffs)))
    logger.debug("Point spectrum for m=%d: %s", m, eigenvalues)
    return SpectrumReport(
        m=m,
        eigenvalues=eigenvalues,
        multiplicities=[1] * eigenvalues.size,
        eigenvectors=vectors,
        residuals=residuals,
        solver={"K": m + 2, "tol": tol, "method": "implicit-ql"},
    )


def negative_eigenfunction(m: int, j: int) -> FourierField:
    if not 0 <= j <= 2 * m - 2:
        raise ValueError(f"Negative eigenfunctions are indexed 0..{2 * m - 2}, got {j}.")
    return point_spectrum_Lplus(m).eigenfunction(j)


def eigenfunction_gram(m: int) -> np.ndarray:
    """L^2(R) Gram matrix of phi_0..phi_{2m-1}."""
    report = point_spectrum_Lplus(m)
    frames = np.array([to_line_frame(FourierField(u)).coeffs for u in report.eigenvectors])
    return 2 * math.pi * np.conj(frames) @ frames.T


@dataclass(frozen=True)
class JLStructureReport:
    m: int
    bound_dimension: int
    lminus_block_norm: float
    lplus_block_eigenvalues: List[float]
    nilpotency_residual: float
    kernel_dimension: int
    generalized_kernel_dimension: int

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "bound_dimension": self.bound_dimension,
            "lminus_block_norm": self.lminus_block_norm,
            "lplus_block_eigenvalues": list(self.lplus_block_eigenvalues),
            "nilpotency_residual": self.nilpotency_residual,
            "kernel_dimension": self.kernel_dimension,
            "generalized_kernel_dimension": self.generalized_kernel_dimension,
        }


def bound_blocks(m: int) -> Tuple[np.ndarray, np.ndarray]:
    """P L+ P and P L- P in isometric line coefficients, P = span e_k for -m <= k <= m-1."""
    K = m + 1
    blocks = []
    for which in ("J", "H"):
        dense = frame_operator(m, which, K).to_dense()
        blocks.append(dense[K - m : K + m, K - m : K + m])
    return blocks[0], blocks[1]


def jl_structure_report(m: int, tol: float = 1e-10) -> JLStructureReport:
    """Finite-dimensional structure of JL on the bound-state subspace.

    Raises:
        StructureMismatch: naming the clause that fails.
    """
    plus, minus = bound_blocks(m)
    dim = plus.shape[0]

    minus_norm = float(np.max(np.abs(minus)))
    if minus_norm > tol:
        raise StructureMismatch(f"(a) P L- P is not zero for m={m}: max entry {minus_norm:.3e}.")

    block_eigs = np.linalg.eigvalsh(plus)
    expected = np.sort(point_spectrum_Lplus(m).eigenvalues)
    if np.max(np.abs(np.sort(block_eigs) - expected)) > tol:
        raise StructureMismatch(f"(b) P L+ P eigenvalues {block_eigs} differ from the point spectrum {expected}.")

    zero = np.zeros_like(plus)
    PLP = np.block([[zero, -minus], [plus, zero]])
    square = PLP @ PLP
    nilpotency = float(np.max(np.abs(square)))
    if nilpotency > tol:
        raise StructureMismatch(f"(c) (P JL P)^2 is not zero for m={m}: max entry {nilpotency:.3e}.")

    rank_tol = max(tol, 1e-8)
    kernel = 2 * dim - int(np.linalg.matrix_rank(PLP, tol=rank_tol))
    if kernel != 2 * m + 1:
        raise StructureMismatch(f"(d) kernel dimension {kernel} differs from {2 * m + 1}.")
    generalized = 2 * dim - int(np.linalg.matrix_rank(square, tol=rank_tol))
    if generalized != 4 * m:
        raise StructureMismatch(f"(e) generalized kernel dimension {generalized} differs from {4 * m}.")

    logger.debug("JL structure for m=%d verified", m)
    return JLStructureReport(
        m=m,
        bound_dimension=dim,
        lminus_block_norm=minus_norm,
        lplus_block_eigenvalues=[float(E) for E in np.sort(block_eigs)],
        nilpotency_residual=nilpotency,
        kernel_dimension=kernel,
        generalized_kernel_dimension=generalized,
    )


def kernel_residuals(m: int) -> dict:
    """Norms of L+ on f_m, g_m and of L- on its kernel basis."""
    modes = zero_modes(m)
    return {
        "lplus": [float(np.linalg.norm(apply_Lplus(m, F).coeffs)) for F in modes],
        "lminus": [float(np.linalg.norm(apply_Lminus(m, F).coeffs)) for F in kernel_basis_Lminus(m)],
    }

