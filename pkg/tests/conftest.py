import numpy as np
import pytest

from diracsim import PureState, gaussian_pointer


@pytest.fixture(scope="session")
def pointer():
    """Default measurement pointer shared across tests (sigma = 1)."""
    return gaussian_pointer(sigma=1.0, grid_points=512, extent_sigmas=12.0)


@pytest.fixture(scope="session")
def qubit_state():
    """(|0> + i|1>)/sqrt(2): the canonical genuinely-complex test state."""
    return PureState(np.array([1.0, 1.0j]) / np.sqrt(2.0))


@pytest.fixture(scope="session")
def qubit_dirac():
    """Analytic distribution of the canonical qubit state."""
    return np.array(
        [[(1 - 1j) / 4, (1 + 1j) / 4], [(1 + 1j) / 4, (1 - 1j) / 4]],
        dtype=np.complex128,
    )
