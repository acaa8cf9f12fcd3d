import numpy as np
import pytest

from rqtraj import MicrostateConstants, PhysicalParams, uniform_potential


@pytest.fixture
def natural():
    """m = c = hbar = 1, relativistic mode."""
    return PhysicalParams()


@pytest.fixture
def free_potential():
    return uniform_potential(0.0)


@pytest.fixture
def classical_consts():
    return MicrostateConstants(1.0, 0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
