import pytest

from mpradon.bumps import BumpCombination, TensorBump, moment_bump


@pytest.fixture(scope="session")
def mean_zero_bump() -> BumpCombination:
    """phi on (0, 1/2) with int phi = 0, int t phi dt = 1."""
    return moment_bump(0.5, 1).bump


@pytest.fixture(scope="session")
def mean_zero_tensor(mean_zero_bump) -> TensorBump:
    return TensorBump((mean_zero_bump, mean_zero_bump))


@pytest.fixture(scope="session")
def mean_one_bump() -> BumpCombination:
    """A single normalized mollifier atom on (1/8, 5/8)."""
    return BumpCombination(((1.0, 0.125, 0.5),))
