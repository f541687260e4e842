import random

import pytest

from sl3hess.exact import Mat3, unimodular_inverse
from sl3hess.spectra import SpectrumClass, spectrum_class

EXAMPLE = Mat3.parse("0,0,1;1,0,1;0,1,3")


def random_matrix(rng: random.Random, bound: int) -> Mat3:
    return Mat3([[rng.randint(-bound, bound) for _ in range(3)] for _ in range(3)])


def random_nrs(rng: random.Random, bound: int = 6) -> Mat3:
    """A det-1 matrix with entries in [-bound, bound] and nonreal spectrum."""
    while True:
        m = random_matrix(rng, bound)
        if m.det() == 1 and spectrum_class(m) is SpectrumClass.NRS:
            return m


def random_unimodular(rng: random.Random, bound: int = 5) -> Mat3:
    while True:
        x = random_matrix(rng, bound)
        if x.det() in (1, -1):
            return x


def conjugate(m: Mat3, x: Mat3) -> Mat3:
    return x @ m @ unimodular_inverse(x)


@pytest.fixture
def rng():
    return random.Random(20240611)
