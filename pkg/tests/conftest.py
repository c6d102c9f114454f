# ============================================================================
# tests/conftest.py
# ============================================================================
"""Shared fixtures."""

import numpy as np
import pytest

import config
from src.data.simulator import make_axis
from src.models.label import MixtureLabel
from src.models.spectrum import RamanSpectrum
from src.models.substances import load_substance_library
from src.transforms.maps import ScaleImage


@pytest.fixture(autouse=True)
def fixed_global_seed():
    """Pin the legacy global generator for any helper that still touches it."""
    np.random.seed(42)


@pytest.fixture
def library():
    """Built-in three-substance peak tables."""
    return load_substance_library()


@pytest.fixture
def axis():
    """Default 400-1800 cm^-1 grid."""
    return make_axis(config.AXIS_START_CM1, config.AXIS_END_CM1, config.AXIS_N_POINTS)


@pytest.fixture
def small_axis():
    """Coarse grid over the same range, for fast pipeline tests."""
    return make_axis(config.AXIS_START_CM1, config.AXIS_END_CM1, 256)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def sample_spectrum(small_axis):
    """Two Lorentzian-like bumps on a small grid, labelled '101'."""
    nu = small_axis.values
    intensity = 1.0 / (1.0 + ((nu - 1000.0) / 8.0) ** 2) + 0.5 / (1.0 + ((nu - 1440.0) / 10.0) ** 2)
    return RamanSpectrum(small_axis, intensity, MixtureLabel.from_string('101'))


@pytest.fixture
def make_image():
    """Factory for constant-valued scale images."""
    def make(value: float, bits: str, shape=(8, 8)) -> ScaleImage:
        return ScaleImage(np.full(shape, value), 'cwt', MixtureLabel.from_string(bits))
    return make
