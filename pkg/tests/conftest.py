import numpy as np
import pytest

from linalg import data_matrix


@pytest.fixture
def rng():
    return np.random.default_rng(20180101)


@pytest.fixture
def gaussian_4x16(rng):
    return data_matrix(rng.standard_normal((4, 16)))


@pytest.fixture
def gaussian_3x8(rng):
    return data_matrix(rng.standard_normal((3, 8)))


def random_instances(rng, count, D, N):
    """`count` Gaussian D x N data matrices."""
    return [data_matrix(rng.standard_normal((D, N))) for _ in range(count)]


def random_signs(rng, *shape):
    return np.where(rng.standard_normal(shape) >= 0, 1.0, -1.0)
