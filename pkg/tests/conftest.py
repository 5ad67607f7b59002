import numpy as np
import pytest

from qlsi.operator_core import random_density
from qlsi.semigroups import davies_qubit_generator, simple_generator
from qlsi.weighted_lp import WeightedSpace

SIGMA_Q = np.diag([0.25, 0.75])


@pytest.fixture(scope="session")
def qubit_space():
    return WeightedSpace(SIGMA_Q)


@pytest.fixture(scope="session")
def unital_qubit_space():
    return WeightedSpace(np.eye(2) / 2)


@pytest.fixture(scope="session")
def qutrit_space():
    return WeightedSpace(random_density(3, 2024, 0.05))


@pytest.fixture(scope="session")
def simple_qubit():
    return simple_generator(SIGMA_Q)


@pytest.fixture(scope="session")
def davies_qubit():
    return davies_qubit_generator(SIGMA_Q, gamma_10=1.3, dephase=0.4)
