import numpy as np
import pytest

from strongpert.adiabatic import track_spectral_path
from strongpert.models import TwoLevelParams, two_level_scenario

# parameters of the worked two-level example
E1, E2, V12, HBAR = 0.1, 0.2, 1.0, 1.0


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


@pytest.fixture(scope="session")
def two_level_params():
    return TwoLevelParams(E1, E2, V12, HBAR)


@pytest.fixture(scope="session")
def two_level(two_level_params):
    """Two-level scenario on [0, 10] with 2001 points, starting in |v1>."""
    return two_level_scenario(two_level_params, 10.0, 2001, initial="v1")


@pytest.fixture(scope="session")
def two_level_path(two_level):
    return two_level.leading_order()


def random_hermitian(rng, d, scale=1.0):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return scale * (a + a.conj().T) / 2


def random_state(rng, d):
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def constant(m):
    m = np.asarray(m, dtype=complex)
    return lambda t: m


def path_for(v_of_t, h0_of_t, grid, **kw):
    return track_spectral_path(v_of_t, h0_of_t, grid, **kw)
