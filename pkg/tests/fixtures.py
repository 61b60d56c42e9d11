import numpy as np
import pytest

from halfwave.soliton_factory import BlaschkeProduct, build_profile, random_blaschke
from halfwave.spectral_core import CircleGrid, FourierField

SEED = 1234


def seeded_rng(seed: int = SEED) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_real_field(rng: np.random.Generator, K: int, decay: float = 0.5) -> FourierField:
    """Coefficients of a random real trigonometric polynomial of degree K."""
    k = np.arange(1, K + 1)
    positive = (rng.standard_normal(K) + 1j * rng.standard_normal(K)) * decay**k
    coeffs = np.concatenate([np.conj(positive[::-1]), [rng.standard_normal()], positive])
    return FourierField(coeffs)


def random_profiles(count: int, velocities, n_points: int = 4096, seed: int = SEED):
    """Blaschke-built profiles of degree 1..4 at each velocity."""
    rng = seeded_rng(seed)
    grid = CircleGrid(n_points)
    profiles = []
    for j in range(count):
        B = random_blaschke(rng, 1 + j % 4)
        for v in velocities:
            profiles.append(build_profile(B, v, grid))
    return profiles


@pytest.fixture
def rng(request):
    """Fixture providing a seeded numpy Generator, also attached to unittest classes."""
    generator = seeded_rng()
    if request.cls is not None:
        request.cls.rng = generator
    return generator


@pytest.fixture
def small_grid(request):
    """Fixture providing a 64-point pole-avoiding circle grid."""
    grid = CircleGrid(64)
    if request.cls is not None:
        request.cls.grid = grid
    return grid


@pytest.fixture
def degree_two_product():
    """Fixture providing a degree-2 Blaschke product with distinct factors."""
    return BlaschkeProduct(phase=0.3, scales=(0.7, 2.0), centers=(-1.0, 0.5))
