import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable

from magtorus import Lattice


@pytest.fixture
def skew():
    # the worked example basis used throughout: e1s = (1, -3/11), e2s = (0, 10/11)
    return Lattice((1.0, 0.0), (0.3, 1.1))


@pytest.fixture
def square():
    return Lattice((1.0, 0.0), (0.0, 1.0))


@pytest.fixture
def rng():
    return np.random.default_rng(20260814)
