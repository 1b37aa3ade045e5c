"""Shared fixtures. Calibration is slow enough to be worth caching."""

import pytest

from homeactivity.fusion import load_default_rules
from homeactivity.simulate import QUIET, calibrate_centroids


@pytest.fixture(scope="session")
def default_rules():
    return load_default_rules()


@pytest.fixture(scope="session")
def quiet_model():
    """Noise-free centroid model over the seven motion classes."""
    return calibrate_centroids(QUIET)
