import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from nodimhelly import EuclideanZeta, SpaceSpec, rk_sequence

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def euclid_r():
    """Euclidean Helly radii r_1..r_64."""
    return rk_sequence(EuclideanZeta(), 64)


@pytest.fixture
def plane():
    return SpaceSpec.euclidean(2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
