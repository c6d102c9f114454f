"""Raman spectrum data structures."""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.errors import InvalidRangeError, ProfileError
from src.models.label import MixtureLabel


@dataclass(frozen=True)
class SpectrumAxis:
    """Uniform Raman-shift grid.

    Attributes:
        start_cm1: First wavenumber (cm^-1)
        end_cm1: Last wavenumber (cm^-1), inclusive
        n_points: Number of grid points (>= 2)
    """
    start_cm1: float
    end_cm1: float
    n_points: int

    def __post_init__(self):
        if not np.isfinite(self.start_cm1) or not np.isfinite(self.end_cm1):
            raise InvalidRangeError(f"Axis bounds must be finite, got ({self.start_cm1}, {self.end_cm1})")
        if not self.start_cm1 < self.end_cm1:
            raise InvalidRangeError(
                f"Axis start must be below end, got start={self.start_cm1}, end={self.end_cm1}"
            )
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise InvalidRangeError(f"Axis needs at least 2 points, got {self.n_points}")

    @property
    def spacing(self) -> float:
        return (self.end_cm1 - self.start_cm1) / (self.n_points - 1)

    @property
    def span(self) -> float:
        return self.end_cm1 - self.start_cm1

    @property
    def values(self) -> np.ndarray:
        """Wavenumber of every grid point."""
        return self.start_cm1 + self.spacing * np.arange(self.n_points)

    def contains(self, wavenumber: float) -> bool:
        return self.start_cm1 <= wavenumber <= self.end_cm1


@dataclass(frozen=True)
class Peak:
    """One Lorentzian Raman band.

    Attributes:
        center: Band position (cm^-1)
        height: Peak intensity (>= 0)
        fwhm: Full width at half maximum (cm^-1, > 0)
    """
    center: float
    height: float
    fwhm: float

    def __post_init__(self):
        if self.height < 0:
            raise ProfileError(f"Peak height must be >= 0, got {self.height}")
        if self.fwhm <= 0:
            raise ProfileError(f"Peak FWHM must be > 0, got {self.fwhm}")


@dataclass(frozen=True)
class SubstanceProfile:
    """Peak table of a pure substance.

    Attributes:
        name: Identifier (e.g., 'oleic_acid')
        peaks: Lorentzian bands of the substance fingerprint
        label_index: Bit position of this substance in a MixtureLabel
        n_labels: Width of the label space
    """
    name: str
    peaks: Tuple[Peak, ...]
    label_index: int = 0
    n_labels: int = 3

    def __post_init__(self):
        object.__setattr__(self, 'peaks', tuple(self.peaks))
        if len(self.peaks) == 0:
            raise ProfileError(f"Substance '{self.name}' has no peaks")
        if not 0 <= self.label_index < self.n_labels:
            raise ProfileError(
                f"Substance '{self.name}' label index {self.label_index} outside 0..{self.n_labels - 1}"
            )

    @property
    def label(self) -> MixtureLabel:
        return MixtureLabel.from_indices([self.label_index], self.n_labels)

    def check_axis(self, axis: SpectrumAxis):
        """Raise if any peak center falls outside the axis range."""
        outside = [p.center for p in self.peaks if not axis.contains(p.center)]
        if outside:
            raise ProfileError(
                f"Substance '{self.name}' has peaks outside [{axis.start_cm1}, {axis.end_cm1}]: {outside}"
            )


@dataclass
class RamanSpectrum:
    """Intensity sampled on a Raman-shift axis.

    Attributes:
        axis: Wavenumber grid
        intensity: One finite value per grid point
        label: Substances present
    """
    axis: SpectrumAxis
    intensity: np.ndarray
    label: MixtureLabel

    def __post_init__(self):
        self.intensity = np.asarray(self.intensity, dtype=float)
        if self.intensity.ndim != 1 or len(self.intensity) != self.axis.n_points:
            raise ValueError(
                f"Intensity length {self.intensity.shape} does not match axis n_points={self.axis.n_points}"
            )
        if not np.all(np.isfinite(self.intensity)):
            raise ValueError("Spectrum intensity contains non-finite values")

    @property
    def power(self) -> float:
        """Mean squared value over the grid."""
        return float(np.mean(self.intensity ** 2))

    def with_intensity(self, intensity: np.ndarray) -> 'RamanSpectrum':
        return RamanSpectrum(self.axis, intensity, self.label)


@dataclass(frozen=True)
class NoiseSpec:
    """Additive white noise request.

    Attributes:
        snr_db: Target 10*log10(P_signal / P_noise)
        seed: Seed of the noise draw
    """
    snr_db: float
    seed: int

    def __post_init__(self):
        if not np.isfinite(self.snr_db):
            raise ValueError(f"SNR must be finite, got {self.snr_db}")

