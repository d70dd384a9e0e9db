import numpy as np
import pytest

from src.numerics.euler import GasModel


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow reproduction tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def gas():
    return GasModel(1.4)


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)
