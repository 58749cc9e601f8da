import math

import numpy as np
import pytest

from nonkam import arnold, rotation_number

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # compile the orbit kernels once so timing assertions measure steady state
    rotation_number(arnold(0.3, 0.5), "weighted_birkhoff", 200)
    rotation_number(arnold(0.3, 0.5), "birkhoff", 200)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
