import numpy as np
import pytest

from dual_sonc.example_instances.loader import InstanceLoader


@pytest.fixture(scope='session')
def loader():
    return InstanceLoader()


@pytest.fixture(scope='session')
def instances(loader):
    return loader.fetch_instances()


@pytest.fixture
def rng():
    return np.random.default_rng(20211)
