import numpy as np
import pytest

from screwsnake.chain import ChainGeometry
from screwsnake.terrain import IDEAL_SCREW_MEDIUM, load_bundled_profile


@pytest.fixture(scope="session")
def geom():
    return ChainGeometry()


@pytest.fixture(scope="session")
def ideal():
    return IDEAL_SCREW_MEDIUM


@pytest.fixture(scope="session")
def concrete():
    return load_bundled_profile("concrete")


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
