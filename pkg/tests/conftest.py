import numpy as np
import pytest

from anharm import OscillatorParams, solve_spectrum


@pytest.fixture(scope="session")
def harmonic():
    return OscillatorParams(1.0, 0.0)


@pytest.fixture(scope="session")
def quartic():
    return OscillatorParams(0.0, 1.0)


@pytest.fixture(scope="session")
def single_well():
    return OscillatorParams(1.0, 10.0)


@pytest.fixture(scope="session")
def double_well():
    return OscillatorParams(-1.0, 0.1)


@pytest.fixture(scope="session")
def quartic_spectrum(quartic):
    return solve_spectrum(quartic, 128, 2.0)


@pytest.fixture(scope="session")
def quartic_spectrum_fine(quartic):
    return solve_spectrum(quartic, 256, 2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
