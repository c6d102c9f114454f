"""Spectrum-to-image transforms: STFT, Wigner-Ville and continuous wavelet."""

from dataclasses import dataclass

import numpy as np

import config
from src.models.spectrum import RamanSpectrum
from src.transforms.cwt import cwt, default_wavelet_spec, mexican_hat, morlet
from src.transforms.maps import ScaleImage, TFMap, WaveletSpec
from src.transforms.scale_image import min_max_normalize, resize_bilinear, to_scale_image
from src.transforms.stft import stft
from src.transforms.wvd import analytic_signal, wvd


@dataclass(frozen=True)
class TransformSettings:
    """Which transform to run and its parameters."""
    kind: str = config.DEFAULT_TRANSFORM
    stft_window_len: int = config.STFT_WINDOW_LEN
    stft_hop: int = config.STFT_HOP
    stft_window: str = config.STFT_WINDOW
    wavelet_family: str = config.WAVELET_FAMILY
    morlet_omega0: float = config.MORLET_OMEGA0
    n_scales: int = config.N_SCALES
    image_height: int = config.IMAGE_HEIGHT
    image_width: int = config.IMAGE_WIDTH

    def __post_init__(self):
        if self.kind not in config.TRANSFORM_KINDS:
            raise ValueError(f"Unknown transform '{self.kind}', expected one of {config.TRANSFORM_KINDS}")


def compute_map(x: np.ndarray, settings: TransformSettings = TransformSettings()) -> TFMap:
    """Run the configured transform on a 1-D signal."""
    if settings.kind == 'stft':
        return stft(x, settings.stft_window_len, settings.stft_hop, settings.stft_window)
    if settings.kind == 'wvd':
        return wvd(x)
    spec = default_wavelet_spec(len(x), settings.wavelet_family,
                                settings.morlet_omega0, settings.n_scales)
    return cwt(x, spec)


def spectrum_to_image(spectrum: RamanSpectrum,
                      settings: TransformSettings = TransformSettings()) -> ScaleImage:
    """Transform a spectrum and resample it to the configured image size."""
    tfmap = compute_map(spectrum.intensity, settings)
    return to_scale_image(tfmap, spectrum.label, settings.image_height, settings.image_width)


__all__ = [
    'ScaleImage',
    'TFMap',
    'TransformSettings',
    'WaveletSpec',
    'analytic_signal',
    'compute_map',
    'cwt',
    'default_wavelet_spec',
    'mexican_hat',
    'min_max_normalize',
    'morlet',
    'resize_bilinear',
    'spectrum_to_image',
    'stft',
    'to_scale_image',
    'wvd',
]
