"""Short-time Fourier transform power map."""

import numpy as np
from scipy import fft, signal as sps

import config
from src.errors import SignalLengthError
from src.transforms.maps import TFMap

WINDOWS = ('hann', 'rect')


def analysis_window(window: str, window_len: int) -> np.ndarray:
    """Periodic Hann or rectangular window."""
    if window == 'rect':
        return np.ones(window_len)
    if window == 'hann':
        return sps.get_window('hann', window_len, fftbins=True)
    raise ValueError(f"Unknown window '{window}', expected one of {WINDOWS}")


def stft(
    x: np.ndarray,
    window_len: int = config.STFT_WINDOW_LEN,
    hop: int = config.STFT_HOP,
    window: str = config.STFT_WINDOW
) -> TFMap:
    """Power spectrogram |DFT(x * g(. - tau))|^2.

    Frame k is centred on sample tau = k * hop and covers
    [tau - window_len // 2, tau - window_len // 2 + window_len); samples outside
    the signal are zero. There are ceil(len(x) / hop) frames.

    Args:
        x: Real signal
        window_len: Frame length (<= len(x))
        hop: Frame step (>= 1)
        window: 'hann' or 'rect'

    Returns:
        TFMap of kind 'stft_power', window_len // 2 + 1 one-sided bins x frames
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"STFT input must be 1-D, got shape {x.shape}")
    if window_len < 1:
        raise ValueError(f"Window length must be >= 1, got {window_len}")
    if window_len > len(x):
        raise SignalLengthError(f"Window length {window_len} exceeds signal length {len(x)}")
    if hop < 1:
        raise ValueError(f"Hop must be >= 1, got {hop}")

    g = analysis_window(window, window_len)
    half = window_len // 2
    n_frames = -(-len(x) // hop)

    padded = np.pad(x, (half, window_len))
    frames = np.lib.stride_tricks.sliding_window_view(padded, window_len)[::hop][:n_frames]

    spectrum = fft.rfft(frames * g, axis=1)
    power = (spectrum.real ** 2 + spectrum.imag ** 2).T

    return TFMap(
        values=power,
        row_axis=fft.rfftfreq(window_len),
        col_axis=np.arange(n_frames) * hop,
        kind='stft_power'
    )
