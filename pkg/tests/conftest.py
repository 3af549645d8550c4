import numpy as np
import pytest

from steepmc.rng import RngStream


@pytest.fixture
def rng():
    """Fixed generator for tests that only need stable randomness."""
    return RngStream(12345, 0).generator()


def generator(seed: int = 12345, stream: int = 0) -> np.random.Generator:
    return RngStream(seed, stream).generator()
