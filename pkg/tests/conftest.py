import numpy as np
import pytest

from eavesim import scenarios


@pytest.fixture(scope="session")
def model():
    """The second-order benchmark plant shared across test modules."""
    return scenarios.benchmark_system()


def random_stable(rng, n, rho_target=0.9):
    """Random square matrix rescaled to the requested spectral radius."""
    m = rng.standard_normal((n, n))
    rho = max(abs(np.linalg.eigvals(m)))
    return m * (rho_target / rho)


def random_psd(rng, n, scale=1.0):
    """Random symmetric PSD matrix."""
    m = rng.standard_normal((n, n))
    return scale * (m @ m.T) / n
