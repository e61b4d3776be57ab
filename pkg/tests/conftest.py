import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from spectra.families import build_model  # noqa: E402


def binary_entropy(u: float) -> float:
    return -u * math.log(u) - (1 - u) * math.log(1 - u)


@pytest.fixture(scope="session")
def paramagnet():
    return build_model("paramagnet")


@pytest.fixture(scope="session")
def lattice_gas():
    return build_model("lattice-gas")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def h():
    return binary_entropy
