import math

import numpy as np
import pytest

from ovalbill import Oval, SupportFunction


@pytest.fixture(scope="session")
def circle():
    return Oval(SupportFunction.circle())


@pytest.fixture(scope="session")
def tri():
    """g = 1 + 0.05 cos(3 phi): maximum at 0, minimum at pi/3."""
    return Oval(SupportFunction.cosine(3, 0.05))


@pytest.fixture(scope="session")
def quad():
    return Oval(SupportFunction.cosine(4, 0.02))


def random_points(rng, count, pmax=0.95):
    phi = rng.uniform(0.0, 2.0 * math.pi, count)
    p = rng.uniform(-pmax, pmax, count)
    return phi, p


def angle_diff(a, b):
    return (np.asarray(a) - np.asarray(b) + math.pi) % (2.0 * math.pi) - math.pi
