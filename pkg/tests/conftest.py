import math

import pytest
from hypothesis import settings

from ibm_lifetime.domains import spectrum_box, spectrum_interval

settings.register_profile("repo", deadline=None, max_examples=40)
settings.load_profile("repo")


@pytest.fixture(scope="session")
def unit_interval():
    return spectrum_interval(0.0, 1.0)


@pytest.fixture(scope="session")
def unit_square():
    return spectrum_box([(0.0, 1.0), (0.0, 1.0)])


HALF_PI2 = math.pi ** 2 / 2
