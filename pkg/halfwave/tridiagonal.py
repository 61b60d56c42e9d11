import logging
import math
from dataclasses import dataclass

import numpy as np

from halfwave.errors import QLConvergenceError

logger = logging.getLogger(__name__)

MAX_QL_SWEEPS = 30


@dataclass(frozen=True, eq=False)
class TridiagonalOperator:
    """Tridiagonal matrix with rows and columns labelled start, start+1, ...

    upper[j] is the entry (j, j+1) and lower[j] the entry (j+1, j), both
    counted from the first row.
    """

    diag: np.ndarray
    upper: np.ndarray
    lower: np.ndarray
    start: int = 0

    def __post_init__(self):
        kind = complex if any(np.iscomplexobj(a) for a in (self.diag, self.upper, self.lower)) else float
        diag = np.asarray(self.diag, dtype=kind)
        upper = np.asarray(self.upper, dtype=kind)
        lower = np.asarray(self.lower, dtype=kind)
        if diag.ndim != 1 or diag.size == 0:
            raise ValueError("The diagonal must be a non-empty 1-D array.")
        if upper.shape != (diag.size - 1,) or lower.shape != (diag.size - 1,):
            raise ValueError(
                f"Off-diagonals of a {diag.size}x{diag.size} tridiagonal matrix need {diag.size - 1} entries."
            )
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "lower", lower)

    @property
    def size(self) -> int:
        return self.diag.size

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.diag)

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.start, self.start + self.size)

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.upper, 1) + np.diag(self.lower, -1)

    def matvec(self, x) -> np.ndarray:
        x = np.asarray(x)
        if x.shape != (self.size,):
            raise ValueError(f"Expected a vector of length {self.size}, got shape {x.shape}.")
        y = self.diag * x
        y[:-1] += self.upper * x[1:]
        y[1:] += self.lower * x[:-1]
        return y

    def block(self, first: int, last: int) -> "TridiagonalOperator":
        """Principal sub-block with labels first..last inclusive."""
        i, j = first - self.start, last - self.start + 1
        if i < 0 or j > self.size or i >= j:
            raise ValueError(f"Labels {first}..{last} are outside {self.start}..{self.start + self.size - 1}.")
        return TridiagonalOperator(self.diag[i:j], self.upper[i : j - 1], self.lower[i : j - 1], first)

    def to_json(self) -> dict:
        return {
            "diag": _json_entries(self.diag),
            "super": _json_entries(self.upper),
            "sub": _json_entries(self.lower),
        }


def _json_entries(values):
    if np.iscomplexobj(values):
        return [[float(v.real), float(v.imag)] for v in values]
    return [float(v) for v in values]


def implicit_ql(diag, offdiag, max_sweeps: int = MAX_QL_SWEEPS):
    """Eigen-decomposition of a real symmetric tridiagonal matrix.

    Implicit-shift QL with deflation on small off-diagonals; the rotations are
    accumulated into the full eigenvector matrix.

    Args:
        diag: the n diagonal entries.
        offdiag: the n-1 off-diagonal entries.
        max_sweeps: sweep limit per eigenvalue.

    Returns:
        Ascending eigenvalues and an orthogonal matrix whose columns are the
        matching eigenvectors.

    Raises:
        QLConvergenceError: when an eigenvalue needs more than max_sweeps sweeps.
    """
    d = np.array(diag, dtype=np.float64)
    n = d.size
    e = np.zeros(n)
    e[: n - 1] = np.asarray(offdiag, dtype=np.float64)
    z = np.eye(n)
    eps = np.finfo(np.float64).eps

    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1 and abs(e[m]) > eps * (abs(d[m]) + abs(d[m + 1])):
                m += 1
            if m == l:
                break
            if sweeps == max_sweeps:
                raise QLConvergenceError(
                    f"Eigenvalue {l} of a {n}x{n} tridiagonal matrix did not converge in {max_sweeps} sweeps."
                )
            sweeps += 1

            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                if abs(f) >= abs(g):
                    c = g / f
                    r = math.hypot(c, 1.0)
                    e[i + 1] = f * r
                    s = 1.0 / r
                    c *= s
                else:
                    s = f / g
                    r = math.hypot(s, 1.0)
                    e[i + 1] = g * r
                    c = 1.0 / r
                    s *= c
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                column = z[:, i + 1].copy()
                z[:, i + 1] = s * z[:, i] + c * column
                z[:, i] = c * z[:, i] - s * column
            d[l] -= p
            e[l] = g
            e[m] = 0.0
        logger.debug("QL eigenvalue %d settled after %d sweeps", l, sweeps)

    order = np.argsort(d, kind="stable")
    return d[order], z[:, order]
