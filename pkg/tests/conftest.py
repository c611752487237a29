import numpy as np
import pytest

from fastmobius import build_mobius_matrix, enumerate_antichains


@pytest.fixture(scope="session")
def table3():
    return enumerate_antichains(3)


@pytest.fixture(scope="session")
def table4():
    return enumerate_antichains(4)


@pytest.fixture(scope="session")
def matrix2():
    return build_mobius_matrix(enumerate_antichains(2))


@pytest.fixture(scope="session")
def matrix3(table3):
    return build_mobius_matrix(table3)


@pytest.fixture(scope="session")
def matrix4(table4):
    return build_mobius_matrix(table4)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
