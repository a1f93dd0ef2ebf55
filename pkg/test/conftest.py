import numpy as np
import pytest

from core.rng import RngState
from textures.datasets import generate_dataset


@pytest.fixture
def rng():
    return RngState(1234)


@pytest.fixture
def np_rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def small_splits():
    """Balanced 40/20/40 split of 32x32 level-1 textures."""
    return generate_dataset((40, 20, 40), 32, 32, 1.0, base_seed=3)
