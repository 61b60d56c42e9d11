"""Time integration of d_t u = -u ^ |nabla| u on the torus and of the spin lattice
d_tau S = S ^ H'(S) with inverse-square exchange.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, NamedTuple, Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.spatial.transform import Rotation

from halfwave.errors import PoleProximity, StabilityViolation
from halfwave.spectral_core import TORUS, SphereField

logger = logging.getLogger(__name__)

STABILITY_CONSTANT = 1.0
NORM_DRIFT_LIMIT = 1e-3
DEFAULT_EXCLUSION = 1e-3
SCHEME = "rk4-projected"


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    snapshots: List[SphereField]
    dt: float
    steps: int
    dealias: bool = True
    scheme: str = SCHEME

    @property
    def final(self) -> SphereField:
        return self.snapshots[-1]

    def manifest(self) -> dict:
        report = conservation_report(self)
        return {
            "dt": self.dt,
            "steps": self.steps,
            "scheme": self.scheme,
            "dealias": self.dealias,
            "conserved": {"E0": report.initial_energy, "drift": report.energy_drift},
        }


def _wavenumbers(n: int) -> np.ndarray:
    return np.fft.fftfreq(n, d=1.0 / n)


def _halfwave_torus(values: np.ndarray) -> np.ndarray:
    k = np.abs(_wavenumbers(values.shape[0]))
    return np.fft.ifft(k[:, None] * np.fft.fft(values, axis=0), axis=0).real


def _dealias(values: np.ndarray) -> np.ndarray:
    """2/3 rule: drop |k| > n/3."""
    n = values.shape[0]
    spectrum = np.fft.fft(values, axis=0)
    spectrum[np.abs(_wavenumbers(n)) > n / 3] = 0.0
    return np.fft.ifft(spectrum, axis=0).real


def torus_rhs(values: np.ndarray, dealias: bool = True) -> np.ndarray:
    product = -np.cross(values, _halfwave_torus(values))
    return _dealias(product) if dealias else product


def _rk4_step(rhs: Callable[[np.ndarray], np.ndarray], values: np.ndarray, dt: float) -> np.ndarray:
    k1 = rhs(values)
    k2 = rhs(values + 0.5 * dt * k1)
    k3 = rhs(values + 0.5 * dt * k2)
    k4 = rhs(values + dt * k3)
    return values + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def _project(values: np.ndarray, step: int) -> np.ndarray:
    norms = np.linalg.norm(values, axis=1)
    drift = float(np.max(np.abs(norms - 1.0)))
    if drift > NORM_DRIFT_LIMIT:
        raise StabilityViolation(f"Pointwise norm drifted by {drift:.3e} at step {step}; reduce dt.")
    return values / norms[:, None]


def evolve_torus(
    u0: SphereField, dt: float, n_steps: int, dealias: bool = True, save_every: Optional[int] = None
) -> Trajectory:
    """Classical RK4 with renormalization onto the sphere after every step.

    Args:
        u0: initial field on a torus grid.
        dt: time step, negative to run backwards.
        n_steps: number of steps.
        dealias: apply the 2/3 rule to the nonlinear product.
        save_every: snapshot interval in steps; by default only the initial
            and final fields are kept.

    Raises:
        StabilityViolation: when |dt| times the largest wavenumber exceeds 1,
            or the norm drifts by more than 1e-3 within a step.
    """
    if u0.chart != TORUS:
        raise ValueError("Dynamics run on torus fields; build u0 on torus_grid(n).")
    n = u0.grid.n_points
    k_max = n // 2
    if abs(dt) * k_max > STABILITY_CONSTANT:
        raise StabilityViolation(f"|dt| * k_max = {abs(dt) * k_max:.3g} exceeds {STABILITY_CONSTANT}.")
    save_every = n_steps if save_every is None else max(1, save_every)

    values = u0.values.copy()
    times, snapshots = [0.0], [u0]
    rhs = lambda u: torus_rhs(u, dealias)  # noqa: E731
    for step in range(1, n_steps + 1):
        values = _project(_rk4_step(rhs, values, dt), step)
        if step % save_every == 0 or step == n_steps:
            times.append(step * dt)
            snapshots.append(SphereField(values.copy(), u0.grid, TORUS))
    logger.debug("Evolved %d nodes for %d steps of %s", n, n_steps, dt)
    return Trajectory(np.array(times), snapshots, dt, n_steps, dealias)


def torus_energy(values: np.ndarray) -> float:
    """1/2 sum over components of 2 pi sum_k |k| |u_k|^2."""
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    spectrum = np.fft.fft(values, axis=0) / n
    k = np.abs(_wavenumbers(n))
    return float(math.pi * np.sum(k[:, None] * np.abs(spectrum) ** 2))


class ConservationReport(NamedTuple):
    initial_energy: float
    energy_drift: float
    norm_drift: float


def conservation_report(traj: Trajectory) -> ConservationReport:
    """Relative energy drift (absolute when E0 = 0) and pointwise norm drift."""
    if not traj.snapshots:
        raise ValueError("The trajectory has no snapshots.")
    energies = np.array([torus_energy(u.values) for u in traj.snapshots])
    E0 = float(energies[0])
    drift = float(np.max(np.abs(energies - E0)))
    if E0 > 0:
        drift /= E0
    norm_drift = max(float(np.max(np.abs(np.linalg.norm(u.values, axis=1) - 1.0))) for u in traj.snapshots)
    return ConservationReport(E0, drift, norm_drift)


def measure_wave_speed(u0: SphereField, uT: SphereField, T: float) -> float:
    """Speed of a rigid translation uT(x) = u0(x - sT), from the cross-correlation peak."""
    n = u0.grid.n_points
    a = np.fft.fft(u0.values, axis=0) / n
    b = np.fft.fft(uT.values, axis=0) / n
    k = _wavenumbers(n)
    overlap = np.sum(np.conj(a) * b, axis=1)

    def correlation(s):
        return float(np.real(np.sum(overlap * np.exp(1j * k * s))))

    shifts = 2 * math.pi * np.arange(n) / n
    coarse = shifts[int(np.argmax([correlation(s) for s in shifts]))]
    h = 2 * math.pi / n
    result = minimize_scalar(lambda s: -correlation(s), bounds=(coarse - h, coarse + h), method="bounded",
                             options={"xatol": 1e-12})
    shift = (result.x + math.pi) % (2 * math.pi) - math.pi
    return shift / T


class MomentumReport(NamedTuple):
    raw: float
    normalized: float


def momentum(u: SphereField, e: Sequence[float] = (0.0, 0.0, 1.0), delta: float = DEFAULT_EXCLUSION) -> MomentumReport:
    """Integral of A(u) . d_x u with A(u) = (e ^ u) / (e . u - 1), defined modulo 4 pi.

    Raises:
        PoleProximity: when the field comes within delta of e.
    """
    e = np.asarray(e, dtype=float)
    values = u.values
    distance = float(np.min(np.linalg.norm(values - e, axis=1)))
    if distance <= delta:
        raise PoleProximity(f"The field comes within {distance:.3e} of the reference direction (delta {delta}).")
    n = u.grid.n_points
    k = _wavenumbers(n)
    derivative = np.fft.ifft(1j * k[:, None] * np.fft.fft(values, axis=0), axis=0).real
    potential = np.cross(e, values) / (values @ e - 1.0)[:, None]
    raw = float(np.sum(potential * derivative) * u.grid.spacing)
    normalized = 2 * math.pi - (2 * math.pi - raw) % (4 * math.pi)
    return MomentumReport(raw, normalized)


@dataclass(frozen=True, eq=False)
class SpinLattice:
    """Unit spins at positions x_k with inverse-square exchange.

    With a period L the coupling sums all periodic images,
    sum_j 1/(d + jL)^2 = (pi/L)^2 / sin^2(pi d / L).
    """

    positions: np.ndarray
    spins: np.ndarray
    period: Optional[float] = None

    def __post_init__(self):
        positions = np.asarray(self.positions, dtype=float)
        spins = np.asarray(self.spins, dtype=float)
        if spins.shape != (positions.size, 3):
            raise ValueError(f"Expected {positions.size} spins of dimension 3, got shape {spins.shape}.")
        if positions.size < 2:
            raise ValueError("A spin lattice needs at least two sites.")
        drift = np.max(np.abs(np.linalg.norm(spins, axis=1) - 1.0))
        if drift > 1e-12:
            raise ValueError(f"Lattice spins must be unit vectors (max drift {drift:.3e}).")
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "spins", spins)

    @classmethod
    def on_line(cls, h: float, spins) -> "SpinLattice":
        """Sites x_k = h k with k running from -(n // 2) upwards; k = -K..K for n = 2K+1."""
        spins = np.asarray(spins, dtype=float)
        n = spins.shape[0]
        return cls(h * (np.arange(n) - n // 2), spins)

    @classmethod
    def periodic(cls, spins, length: float = 2 * math.pi) -> "SpinLattice":
        spins = np.asarray(spins, dtype=float)
        n = spins.shape[0]
        return cls(length * np.arange(n) / n, spins, length)

    def with_spins(self, spins) -> "SpinLattice":
        return SpinLattice(self.positions, spins, self.period)

    def coupling(self) -> np.ndarray:
        d = self.positions[:, None] - self.positions[None, :]
        off = ~np.eye(self.positions.size, dtype=bool)
        safe = np.where(off, d, 1.0)
        if self.period is None:
            w = 1.0 / safe**2
        else:
            w = (math.pi / self.period) ** 2 / np.sin(math.pi * safe / self.period) ** 2
        return np.where(off, w, 0.0)


def _lattice_rhs(coupling: np.ndarray, spins: np.ndarray) -> np.ndarray:
    field = coupling.sum(axis=1)[:, None] * spins - coupling @ spins
    return np.cross(spins, field)


def lattice_energy(lattice: SpinLattice) -> float:
    """H = 1/2 sum_{k != l} (1 - S_k . S_l) w(x_k - x_l)."""
    w = lattice.coupling()
    return float(0.5 * np.sum(w * (1.0 - lattice.spins @ lattice.spins.T)))


def total_spin(lattice: SpinLattice) -> np.ndarray:
    return lattice.spins.sum(axis=0)


@dataclass(frozen=True, eq=False)
class LatticeTrajectory:
    times: np.ndarray
    lattices: List[SpinLattice]
    dt: float
    steps: int

    @property
    def final(self) -> SpinLattice:
        return self.lattices[-1]

    def drifts(self) -> dict:
        energies = np.array([lattice_energy(L) for L in self.lattices])
        spins = np.array([total_spin(L) for L in self.lattices])
        E0 = energies[0]
        energy_drift = float(np.max(np.abs(energies - E0)))
        if E0 > 0:
            energy_drift /= E0
        return {
            "E0": float(E0),
            "energy_drift": energy_drift,
            "total_spin_drift": float(np.max(np.abs(spins - spins[0]))),
        }


def evolve_spin_lattice(
    lattice: SpinLattice, dt: float, n_steps: int, save_every: Optional[int] = None
) -> LatticeTrajectory:
    """RK4 on d_tau S = S ^ H'(S) with renormalization after every step.

    Raises:
        StabilityViolation: when a spin norm drifts by more than 1e-3 within a step.
    """
    coupling = lattice.coupling()
    save_every = n_steps if save_every is None else max(1, save_every)
    spins = lattice.spins.copy()
    times, lattices = [0.0], [lattice]
    rhs = lambda s: _lattice_rhs(coupling, s)  # noqa: E731
    for step in range(1, n_steps + 1):
        spins = _project(_rk4_step(rhs, spins, dt), step)
        if step % save_every == 0 or step == n_steps:
            times.append(step * dt)
            lattices.append(lattice.with_spins(spins.copy()))
    logger.debug("Evolved %d spins for %d steps of %s", spins.shape[0], n_steps, dt)
    return LatticeTrajectory(np.array(times), lattices, dt, n_steps)


def two_spin_solution(s1, s2, t: float):
    """Closed form for two spins at unit distance: both precess about M = S1 + S2 at rate |M|."""
    s1 = np.asarray(s1, dtype=float)
    s2 = np.asarray(s2, dtype=float)
    total = s1 + s2
    rotated = Rotation.from_rotvec(total * t).apply(s1)
    return rotated, total - rotated


def _resample(values: np.ndarray, n_out: int) -> np.ndarray:
    """Trigonometric interpolation of periodic samples onto n_out equispaced points."""
    n = values.shape[0]
    spectrum = np.fft.fft(values, axis=0) / n
    k = _wavenumbers(n)
    keep = np.abs(k) < min(n, n_out) / 2
    x = 2 * math.pi * np.arange(n_out) / n_out
    phases = np.exp(1j * np.outer(x, k[keep]))
    out = (phases @ spectrum[keep]).real
    return out / np.linalg.norm(out, axis=1, keepdims=True)


def continuum_discrepancy(u0: SphereField, T: float, site_counts: Sequence[int], dt: float = 1e-3) -> List[float]:
    """Sup distance at time T between periodic-lattice and continuum evolutions.

    The lattice runs in tau = -(h/pi) t so that d_tau S = S ^ H' tracks
    d_t u = -u ^ |nabla| u as h shrinks.
    """
    steps = max(1, int(round(T / dt)))
    reference = evolve_torus(u0, dt, steps).final.values
    discrepancies = []
    for count in site_counts:
        lattice = SpinLattice.periodic(_resample(u0.values, count))
        h = 2 * math.pi / count
        final = evolve_spin_lattice(lattice, -(h / math.pi) * dt, steps).final.spins
        target = _resample(reference, count)
        discrepancies.append(float(np.max(np.linalg.norm(final - target, axis=1))))
        logger.debug("Lattice with %d sites differs from the continuum by %.3e", count, discrepancies[-1])
    return discrepancies

