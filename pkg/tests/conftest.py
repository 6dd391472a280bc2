import numpy as np
import pytest

from kinclosure.quadrature import GasConstants


@pytest.fixture
def c():
    return GasConstants()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
