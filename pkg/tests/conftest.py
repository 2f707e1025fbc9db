import numpy as np
import pytest

from revcarleson.kernels import TestFunction
from revcarleson.quadrature import radial_rule, sphere_grid

TestFunction.__test__ = False  # dataclass, not a test case


@pytest.fixture(scope="session")
def circle_grid():
    return sphere_grid(1, 2048)


@pytest.fixture(scope="session")
def torus_grid():
    # 16 u-nodes x 16 x 16 phases; enough for the smooth integrands below
    return sphere_grid(2, 16)


@pytest.fixture(scope="session")
def mc_grid():
    return sphere_grid(3, 20000, seed=0)


@pytest.fixture(scope="session")
def radial24():
    return radial_rule(1, 24)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
