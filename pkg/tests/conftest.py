import numpy as np
import pytest
from hypothesis import settings

from urglq.arraymodel import ArrayGeometry, SourceSpec, generate_snapshots

# timing varies a lot in CI containers; correctness is what the properties check
settings.register_profile("default", deadline=None)
settings.load_profile("default")


@pytest.fixture
def ula10():
    return ArrayGeometry(10, 0.5)


@pytest.fixture
def scenario_data(ula10):
    """One seeded dataset of the default scenario: desired 10 deg at 20 dB SNR,
    interferers at -30 and 40 deg at 20 dB INR, K=30, unit noise."""
    sources = [SourceSpec(10.0, 100.0, "desired"), SourceSpec(-30.0, 100.0), SourceSpec(40.0, 100.0)]
    return generate_snapshots(ula10, sources, 1.0, 30, rng_seed=2024)


def random_hermitian(rng, M, pd=False):
    A = rng.standard_normal((M, M)) + 1j * rng.standard_normal((M, M))
    if pd:
        return A @ A.conj().T + M * np.eye(M)
    return (A + A.conj().T) / 2
