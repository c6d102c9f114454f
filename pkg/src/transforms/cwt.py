"""Continuous wavelet transform magnitude map.

    values[a, b] = a^(-1/2) * | sum_t x[t] * conj(psi((t - b) / a)) |

The mother wavelet is sampled on |t - b| <= WAVELET_SUPPORT * a and the sum is
evaluated as one FFT convolution per scale.
"""

from typing import Optional

import numpy as np
from scipy import signal as sps

import config
from src.errors import SignalLengthError
from src.transforms.maps import TFMap, WaveletSpec

MIN_CWT_LENGTH = 8
MEXICAN_HAT_PEAK = np.sqrt(2.5)


def morlet(x: np.ndarray, omega0: float = config.MORLET_OMEGA0) -> np.ndarray:
    """pi^(-1/4) * exp(j omega0 x) * exp(-x^2 / 2)"""
    x = np.asarray(x, dtype=float)
    return np.pi ** -0.25 * np.exp(1j * omega0 * x) * np.exp(-0.5 * x ** 2)


def mexican_hat(x: np.ndarray) -> np.ndarray:
    """Negative normalized second derivative of a Gaussian."""
    x = np.asarray(x, dtype=float)
    return 2.0 / (np.sqrt(3.0) * np.pi ** 0.25) * (1.0 - x ** 2) * np.exp(-0.5 * x ** 2)


def mother_wavelet(spec: WaveletSpec, x: np.ndarray) -> np.ndarray:
    if spec.family == 'morlet':
        return morlet(x, spec.center_frequency)
    return mexican_hat(x).astype(complex)


def scale_for_period(family: str, period: float,
                     omega0: float = config.MORLET_OMEGA0) -> float:
    if family == 'morlet':
        return omega0 * period / (2.0 * np.pi)
    return MEXICAN_HAT_PEAK * period / (2.0 * np.pi)


def default_wavelet_spec(
    n_samples: int,
    family: str = config.WAVELET_FAMILY,
    omega0: float = config.MORLET_OMEGA0,
    n_scales: int = config.N_SCALES
) -> WaveletSpec:
    """Scale grid covering periods MIN_PERIOD_SAMPLES .. n_samples / MAX_PERIOD_DIVISOR.

    Example:
        >>> spec = default_wavelet_spec(1024)
        >>> round(spec.scale_min, 3), round(spec.scale_max, 2)
        (3.82, 244.46)
    """
    min_period = config.MIN_PERIOD_SAMPLES
    max_period = n_samples / config.MAX_PERIOD_DIVISOR
    if max_period <= min_period:
        raise SignalLengthError(
            f"Signal of {n_samples} samples too short for a scale grid "
            f"(needs more than {min_period * config.MAX_PERIOD_DIVISOR:.0f})"
        )
    return WaveletSpec(
        family=family,
        center_frequency=omega0,
        n_scales=n_scales,
        scale_min=scale_for_period(family, min_period, omega0),
        scale_max=scale_for_period(family, max_period, omega0)
    )


def cwt(x: np.ndarray, spec: Optional[WaveletSpec] = None) -> TFMap:
    """Wavelet magnitude map.

    Args:
        x: Real signal, length >= 8
        spec: Wavelet and scales (default_wavelet_spec(len(x)) if None)

    Returns:
        TFMap of kind 'cwt_magnitude', one row per scale (ascending)
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"CWT input must be 1-D, got shape {x.shape}")
    n = len(x)
    if n < MIN_CWT_LENGTH:
        raise SignalLengthError(f"CWT needs at least {MIN_CWT_LENGTH} samples, got {n}")
    if spec is None:
        spec = default_wavelet_spec(n)
    if spec.scale_max > n:
        raise SignalLengthError(f"Largest scale {spec.scale_max:.1f} exceeds signal length {n}")

    scales = spec.scales
    values = np.empty((len(scales), n))
    for i, a in enumerate(scales):
        half = min(int(np.ceil(config.WAVELET_SUPPORT * a)), n - 1)
        offsets = np.arange(-half, half + 1)
        kernel = np.conj(mother_wavelet(spec, offsets / a))
        row = sps.fftconvolve(x, kernel[::-1], mode='same')
        values[i] = np.abs(row) / np.sqrt(a)

    return TFMap(values=values, row_axis=scales, col_axis=np.arange(n), kind='cwt_magnitude')
