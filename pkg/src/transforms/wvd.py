"""Discrete Wigner-Ville distribution.

For the analytic signal z of x:

    W[k, t] = Re sum_tau z[t + tau] * conj(z[t - tau]) * exp(-j 2 pi k tau / N)

with |tau| <= min(t, N - 1 - t). Because the lag enters twice, row k sits at
normalized frequency k / (2N), so the N rows span [0, 0.5) cycles/sample.
Multi-component signals produce cross terms midway between components.
"""

import numpy as np
from scipy import fft, signal as sps

from src.errors import SignalLengthError
from src.transforms.maps import TFMap


def analytic_signal(x: np.ndarray) -> np.ndarray:
    """Analytic signal via the DFT sign mask (negative frequencies zeroed)."""
    return sps.hilbert(np.asarray(x, dtype=float))


def instantaneous_autocorrelation(z: np.ndarray) -> np.ndarray:
    """Lag-by-time matrix R[tau mod N, t] = z[t + tau] * conj(z[t - tau])."""
    n = len(z)
    taus = np.arange(-(n // 2 - 1), n // 2)
    times = np.arange(n)

    plus = times[None, :] + taus[:, None]
    minus = times[None, :] - taus[:, None]
    valid = (plus >= 0) & (plus < n) & (minus >= 0) & (minus < n)

    products = z[np.clip(plus, 0, n - 1)] * np.conj(z[np.clip(minus, 0, n - 1)])
    r = np.zeros((n, n), dtype=complex)
    r[taus % n, :] = np.where(valid, products, 0.0)
    return r


def wvd(x: np.ndarray) -> TFMap:
    """Wigner-Ville distribution of a real signal.

    Args:
        x: Real signal, even length >= 4

    Returns:
        TFMap of kind 'wvd' with N frequency rows and N time columns
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"WVD input must be 1-D, got shape {x.shape}")
    n = len(x)
    if n < 4 or n % 2:
        raise SignalLengthError(f"WVD needs an even signal length >= 4, got {n}")

    r = instantaneous_autocorrelation(analytic_signal(x))
    values = fft.fft(r, axis=0).real

    return TFMap(
        values=values,
        row_axis=np.arange(n) / (2.0 * n),
        col_axis=np.arange(n),
        kind='wvd'
    )
