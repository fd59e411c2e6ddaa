import numpy as np
import pytest

from feec4d.tensorpoly import TensorPoly4


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def X(axis):
    """Coordinate polynomial x_{axis+1}."""
    return TensorPoly4.coordinate(axis)


def C(value):
    return TensorPoly4.constant(value)
