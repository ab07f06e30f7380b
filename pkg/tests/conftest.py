import numpy as np
import pytest

from kernelpi import Kernel, benchmark_system, gauss_legendre_tensor, unit_box


@pytest.fixture(scope="session")
def box():
    return unit_box(2)


@pytest.fixture(scope="session")
def matern():
    return Kernel("matern52", 0.5)


@pytest.fixture(scope="session")
def bench():
    return benchmark_system()


@pytest.fixture(scope="session")
def rule40(box):
    return gauss_legendre_tensor(box, 40)


@pytest.fixture(scope="session")
def rule20(box):
    return gauss_legendre_tensor(box, 20)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
