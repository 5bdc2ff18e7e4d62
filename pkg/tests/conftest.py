import numpy as np
import pytest

from src.core.types import RunConfig
from src.qcore.states import density_from_state, ghz_state, w_state


@pytest.fixture
def cfg() -> RunConfig:
    return RunConfig()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240617)


@pytest.fixture(scope="session")
def ghz3():
    return density_from_state(ghz_state(3))


@pytest.fixture(scope="session")
def w3():
    return density_from_state(w_state(3))


@pytest.fixture(scope="session")
def w4():
    return density_from_state(w_state(4))
