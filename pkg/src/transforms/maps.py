"""Time-frequency map, wavelet and scale-image data structures."""

from dataclasses import dataclass

import numpy as np

from src.errors import InvalidRangeError, ShapeMismatchError
from src.models.label import MixtureLabel

MAP_KINDS = ('stft_power', 'wvd', 'cwt_magnitude')
WAVELET_FAMILIES = ('morlet', 'mexican_hat')
NON_NEGATIVE_KINDS = ('stft_power', 'cwt_magnitude')


@dataclass
class TFMap:
    """2-D transform output.

    Attributes:
        values: rows = frequency bins or scales, cols = sample positions
        row_axis: Bin frequency (cycles/sample) or wavelet scale per row
        col_axis: Sample position per column
        kind: 'stft_power', 'wvd' or 'cwt_magnitude'
    """
    values: np.ndarray
    row_axis: np.ndarray
    col_axis: np.ndarray
    kind: str

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.row_axis = np.asarray(self.row_axis, dtype=float)
        self.col_axis = np.asarray(self.col_axis, dtype=float)

        if self.kind not in MAP_KINDS:
            raise ValueError(f"Unknown map kind '{self.kind}', expected one of {MAP_KINDS}")
        if self.values.ndim != 2:
            raise ShapeMismatchError(f"Map values must be 2-D, got shape {self.values.shape}")
        if self.values.shape != (len(self.row_axis), len(self.col_axis)):
            raise ShapeMismatchError(
                f"Map shape {self.values.shape} does not match axes "
                f"({len(self.row_axis)}, {len(self.col_axis)})"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError(f"{self.kind} map contains non-finite values")
        if self.kind in NON_NEGATIVE_KINDS and np.any(self.values < 0):
            raise ValueError(f"{self.kind} map contains negative values")

    @property
    def shape(self):
        return self.values.shape


@dataclass(frozen=True)
class WaveletSpec:
    """Mother wavelet and scale grid.

    Attributes:
        family: 'morlet' or 'mexican_hat'
        center_frequency: Morlet omega0 (ignored by the Mexican hat)
        n_scales: Number of log-spaced scales (>= 2)
        scale_min: Smallest scale, in samples
        scale_max: Largest scale, in samples
    """
    family: str
    center_frequency: float
    n_scales: int
    scale_min: float
    scale_max: float

    def __post_init__(self):
        if self.family not in WAVELET_FAMILIES:
            raise ValueError(f"Unknown wavelet family '{self.family}', expected one of {WAVELET_FAMILIES}")
        if self.n_scales < 2:
            raise InvalidRangeError(f"Need at least 2 scales, got {self.n_scales}")
        if not 0 < self.scale_min < self.scale_max:
            raise InvalidRangeError(
                f"Scales must satisfy 0 < scale_min < scale_max, got ({self.scale_min}, {self.scale_max})"
            )

    @property
    def scales(self) -> np.ndarray:
        return np.geomspace(self.scale_min, self.scale_max, self.n_scales)


@dataclass
class ScaleImage:
    """Fixed-size network input.

    Attributes:
        pixels: H x W values in [0, 1]
        source_kind: Kind of the map the image was made from
        label: Substances present
    """
    pixels: np.ndarray
    source_kind: str
    label: MixtureLabel

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels, dtype=float)
        if self.pixels.ndim != 2:
            raise ShapeMismatchError(f"Scale image must be 2-D, got shape {self.pixels.shape}")
        if self.pixels.size and (self.pixels.min() < 0 or self.pixels.max() > 1):
            raise ValueError(
                f"Scale image values must lie in [0, 1], got [{self.pixels.min()}, {self.pixels.max()}]"
            )

    @property
    def shape(self):
        return self.pixels.shape

    def with_pixels(self, pixels: np.ndarray) -> 'ScaleImage':
        return ScaleImage(pixels, self.source_kind, self.label)
