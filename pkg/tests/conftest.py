import math

import numpy as np
import pytest

from qwskeleton.coin import hadamard, random_coin

SQ = 1 / math.sqrt(2)
PHI_SYM = np.array([SQ, 1j * SQ])
PHI_L = np.array([1.0, 0.0], dtype=complex)


@pytest.fixture
def had():
    return hadamard()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_phi(rng):
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return v / np.linalg.norm(v)


def random_coins(seed, count):
    g = np.random.default_rng(seed)
    return [random_coin(g) for _ in range(count)]
