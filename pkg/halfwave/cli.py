import argparse
import logging
import math
import os
import sys

import numpy as np

from halfwave.config import COMMANDS, FORMATS, RunConfig, build_run_config, load_config
from halfwave.dynamics import (
    SpinLattice,
    conservation_report,
    evolve_spin_lattice,
    evolve_torus,
    measure_wave_speed,
)
from halfwave.eigensolver import point_spectrum_Lplus
from halfwave.errors import HalfWaveError, UsageError
from halfwave.gauge_hardy import (
    BoundProjector,
    bound_overlap,
    gauge_adjoint,
    gauge_forward,
    verify_unitary_equivalence,
)
from halfwave.reporting import (
    PROFILE_HEADER,
    SNAPSHOT_HEADER,
    emit_report,
    snapshot_rows,
)
from halfwave.soliton_factory import (
    BlaschkeProduct,
    build_profile,
    energy_analytic,
    energy_numeric,
    infinite_energy_solution,
    profile_rows,
    pure_power_map,
)
from halfwave.spectral_core import CircleGrid, FourierField, torus_grid
from halfwave.verification import (
    area_length_check,
    coercivity_rayleigh,
    conformality_check,
    profile_residual,
)

logger = logging.getLogger(__name__)

GAUGE_PROBES = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="halfwave", description="Solitons of the half-wave maps equation.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--m", type=int)
    parser.add_argument("--v", type=float)
    parser.add_argument("--s", type=int, help="holomorphy sign of the soliton, 1 or -1")
    parser.add_argument("--n", type=int, help="grid points")
    parser.add_argument("--K", type=int, help="band limit")
    parser.add_argument("--dt", type=float)
    parser.add_argument("--steps", type=int)
    parser.add_argument("--tol", type=float)
    parser.add_argument("--out")
    parser.add_argument("--format", choices=FORMATS)
    parser.add_argument("--config", help="key=value file; command-line flags take precedence")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--verbose", action="store_true")
    return parser


def parse_args(argv=None) -> RunConfig:
    """Parse the command line into a validated RunConfig.

    Raises:
        UsageError: naming the offending flag.
    """
    args = _build_parser().parse_args(argv)
    file_values = load_config(args.config) if args.config else {}
    cli_values = {key: getattr(args, key) for key in ("m", "v", "s", "n", "K", "dt", "steps", "tol", "out", "format", "seed")}
    return build_run_config(args.command, cli_values, file_values)


def run_spectrum(config: RunConfig):
    report = point_spectrum_Lplus(config.m, config.tol)
    rows = [[j, float(E), float(r)] for j, (E, r) in enumerate(zip(report.eigenvalues, report.residuals))]
    return report, rows, ["index", "eigenvalue", "residual"]


def run_soliton(config: RunConfig):
    profile = build_profile(BlaschkeProduct.pure_power(config.m, config.s), config.v, CircleGrid(config.n))
    payload = {
        "m": config.m,
        "v": config.v,
        "s": config.s,
        "n": config.n,
        "energy_numeric": energy_numeric(profile.field),
        "energy_analytic": energy_analytic(profile.blaschke, config.v),
    }
    return payload, profile_rows(profile), PROFILE_HEADER


def run_residual(config: RunConfig):
    B = BlaschkeProduct.pure_power(config.m, config.s)
    profile = build_profile(B, config.v, CircleGrid(config.n))
    payload = {
        "profile": profile_residual(profile, [config.n // 2, config.n]),
        "conformality": conformality_check(pure_power_map(config.m, CircleGrid(config.n))),
        "area_length": area_length_check(profile),
    }
    return payload, None, None


def run_coerce(config: RunConfig):
    payload = {
        "m": config.m,
        "K": config.K,
        "minimum": coercivity_rayleigh(config.m, config.K),
        "expected": 1.0 / (config.m + 1),
    }
    return payload, None, None


def run_gauge(config: RunConfig):
    m = config.m
    rng = np.random.default_rng(config.seed)
    band = m + 6
    projector = BoundProjector.for_degree(m, band + m)
    unitarity = leak = equivalence = 0.0
    for _ in range(GAUGE_PROBES):
        coeffs = np.zeros(2 * band + 1, dtype=complex)
        inner = slice(m + 2, 2 * band + 1 - (m + 2))
        size = coeffs[inner].size
        coeffs[inner] = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        G = FourierField(coeffs)
        UG = gauge_forward(m, G)
        unitarity = max(unitarity, float(np.max(np.abs(gauge_adjoint(m, UG).coeffs - G.coeffs))))
        leak = max(leak, float(np.linalg.norm(projector.apply(UG).coeffs)), bound_overlap(m, UG))
        equivalence = max(equivalence, verify_unitary_equivalence(m, G))
    payload = {
        "m": m,
        "unitarity": unitarity,
        "projector_leak": leak,
        "projector_defect": projector.defect(),
        "equivalence_residual": equivalence,
    }
    return payload, None, None


def run_evolve(config: RunConfig):
    grid = torus_grid(config.n)
    u0 = infinite_energy_solution(config.v, grid)
    trajectory = evolve_torus(u0, config.dt, config.steps)
    T = config.dt * config.steps
    exact = infinite_energy_solution(config.v, grid, t=T)
    manifest = trajectory.manifest()
    manifest["max_error"] = float(np.max(np.abs(trajectory.final.values - exact.values)))
    manifest["norm_drift"] = conservation_report(trajectory).norm_drift
    manifest["wave_speed"] = measure_wave_speed(u0, trajectory.final, T)
    manifest["v"] = config.v
    manifest["n"] = config.n
    return manifest, snapshot_rows(trajectory.final), SNAPSHOT_HEADER


def run_lattice(config: RunConfig):
    initial = infinite_energy_solution(config.v, torus_grid(config.n))
    lattice = SpinLattice.periodic(initial.values)
    h = 2 * math.pi / config.n
    trajectory = evolve_spin_lattice(lattice, -(h / math.pi) * config.dt, config.steps)
    payload = trajectory.drifts()
    payload.update({"sites": config.n, "dt": config.dt, "steps": config.steps})
    return payload, None, None


RUNNERS = {
    "spectrum": run_spectrum,
    "soliton": run_soliton,
    "residual": run_residual,
    "coerce": run_coerce,
    "gauge": run_gauge,
    "evolve": run_evolve,
    "lattice": run_lattice,
}


def main(args=None) -> int:
    argv = sys.argv[1:] if args is None else list(args)
    verbose = "--verbose" in argv
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s - %(levelname)s - %(message)s",
    )
    try:
        config = parse_args(argv)
    except UsageError as e:
        print(f"Usage error: {e}", file=sys.stderr)
        return 2
    except (HalfWaveError, OSError) as e:
        print(f"Something went wrong while reading the configuration: {e}", file=sys.stderr)
        return 1

    try:
        report, rows, header = RUNNERS[config.command](config)
        emit_report(report, config, rows, header)
    except (HalfWaveError, OSError, ValueError) as e:
        print(f"Something unexpected went wrong: {e}.", file=sys.stderr)
        return 1
    if config.out:
        print(f"Great news! The {config.command} report was written to {os.path.abspath(config.out)}.")
    return 0


if __name__ == "__main__":
    sys.exit(main())
