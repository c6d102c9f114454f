"""Synthetic Raman spectra: pure substances, mixtures, fluorescence and noise.

Stands in for instrument acquisition. Raman bands are Lorentzian, the
fluorescence background is a broad Gaussian, and detector noise is a single
additive white Gaussian term calibrated to a requested SNR:

    SNR(dB) = 10 * log10(P_signal / P_noise),   P = mean of squared samples
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

import config
from src.errors import InvalidRangeError, ProfileError, ZeroSignalError
from src.models.label import MIXTURE_CLASSES, MixtureLabel
from src.models.spectrum import NoiseSpec, RamanSpectrum, SpectrumAxis, SubstanceProfile
from src.utils.parallel import ordered_map
from src.utils.seeding import derive_rng


@dataclass(frozen=True)
class AcquisitionSettings:
    """How one simulated acquisition varies from sample to sample.

    Attributes:
        ratios: Mixing weight per substance name when present
        weight_jitter: Relative uniform jitter applied to each weight
        fluorescence_amplitude_range: Baseline amplitude, relative to the strongest Raman band
        fluorescence_width_frac_range: Baseline width as a fraction of the axis span
        snr_db: Acquisition SNR
    """
    ratios: Tuple[Tuple[str, float], ...] = tuple(config.MIXING_RATIO.items())
    weight_jitter: float = config.WEIGHT_JITTER
    fluorescence_amplitude_range: Tuple[float, float] = config.FLUORESCENCE_AMPLITUDE_RANGE
    fluorescence_width_frac_range: Tuple[float, float] = config.FLUORESCENCE_WIDTH_FRAC_RANGE
    snr_db: float = config.ACQUISITION_SNR_DB

    def ratio_of(self, name: str) -> float:
        return dict(self.ratios).get(name, 1.0)


def make_axis(start_cm1: float, end_cm1: float, n_points: int) -> SpectrumAxis:
    """Create a uniform Raman-shift axis.

    Args:
        start_cm1: First wavenumber
        end_cm1: Last wavenumber (must exceed start)
        n_points: Number of points (>= 2)

    Returns:
        SpectrumAxis with spacing (end - start) / (n_points - 1)
    """
    return SpectrumAxis(float(start_cm1), float(end_cm1), int(n_points))


def lorentzian(nu: np.ndarray, center: float, fwhm: float) -> np.ndarray:
    """Unit-height Lorentzian band: gamma^2 / ((nu - center)^2 + gamma^2), gamma = fwhm / 2."""
    gamma = fwhm / 2.0
    return gamma ** 2 / ((nu - center) ** 2 + gamma ** 2)


def synth_pure(profile: SubstanceProfile, axis: SpectrumAxis) -> RamanSpectrum:
    """Render a pure-substance spectrum as a sum of Lorentzian bands.

    Args:
        profile: Substance peak table (centers must lie on the axis)
        axis: Raman-shift grid

    Returns:
        RamanSpectrum labelled with only this substance
    """
    profile.check_axis(axis)
    nu = axis.values
    intensity = np.zeros(axis.n_points)
    for peak in profile.peaks:
        intensity += peak.height * lorentzian(nu, peak.center, peak.fwhm)
    return RamanSpectrum(axis, intensity, profile.label)


def synth_mixture(
    components: Sequence[Tuple[SubstanceProfile, float]],
    axis: SpectrumAxis
) -> RamanSpectrum:
    """Linear mixture of pure spectra.

    Weights are normalized to sum to 1; substances with weight 0 contribute
    nothing and are absent from the label.

    Args:
        components: (profile, weight >= 0) pairs
        axis: Raman-shift grid

    Returns:
        Mixture spectrum labelled with the union of positive-weight substances
    """
    if not components:
        raise ProfileError("Mixture needs at least one component")

    for profile, weight in components:
        if weight < 0 or not np.isfinite(weight):
            raise ProfileError(f"Weight for '{profile.name}' must be finite and >= 0, got {weight}")

    total = float(sum(weight for _, weight in components))
    if total <= 0:
        raise ProfileError("Mixture weights are all zero")

    n_labels = components[0][0].n_labels
    label = MixtureLabel(tuple(False for _ in range(n_labels)))
    intensity = np.zeros(axis.n_points)

    for profile, weight in components:
        if weight == 0:
            continue
        pure = synth_pure(profile, axis)
        intensity += (weight / total) * pure.intensity
        label = label.union(pure.label)

    return RamanSpectrum(axis, intensity, label)


def add_fluorescence(
    spectrum: RamanSpectrum,
    amplitude: float,
    center_cm1: float,
    width_cm1: float
) -> RamanSpectrum:
    """Add a wideband Gaussian fluorescence background.

    Args:
        spectrum: Input spectrum
        amplitude: Background height (>= 0)
        center_cm1: Background center
        width_cm1: Gaussian standard deviation; must exceed a quarter of the axis span

    Returns:
        New spectrum with the same label
    """
    if amplitude < 0:
        raise InvalidRangeError(f"Fluorescence amplitude must be >= 0, got {amplitude}")

    min_width = spectrum.axis.span / 4.0
    if width_cm1 <= min_width:
        raise InvalidRangeError(
            f"Fluorescence width {width_cm1:.1f} cm^-1 is not wideband (must exceed {min_width:.1f})"
        )

    nu = spectrum.axis.values
    baseline = amplitude * np.exp(-(nu - center_cm1) ** 2 / (2.0 * width_cm1 ** 2))
    return spectrum.with_intensity(spectrum.intensity + baseline)


def noise_power_for_snr(signal_power: float, snr_db: float) -> float:
    """Invert SNR(dB) = 10*log10(P_signal / P_noise) for P_noise."""
    return signal_power / (10.0 ** (snr_db / 10.0))


def add_noise_snr(spectrum: RamanSpectrum, noise: NoiseSpec) -> RamanSpectrum:
    """Add zero-mean white Gaussian noise at a requested SNR.

    The drawn noise vector is centred and rescaled so its mean square equals
    the target noise power exactly; the same (spectrum, noise) pair always
    produces the same output.

    Args:
        spectrum: Input spectrum (must have nonzero power)
        noise: Target SNR and seed

    Returns:
        Noisy spectrum with the same label
    """
    signal_power = spectrum.power
    if signal_power == 0:
        raise ZeroSignalError("Cannot add noise at a given SNR to a zero-power spectrum")

    target = noise_power_for_snr(signal_power, noise.snr_db)

    rng = np.random.default_rng(noise.seed)
    draw = rng.standard_normal(spectrum.axis.n_points)
    draw -= draw.mean()
    draw_power = float(np.mean(draw ** 2))
    if draw_power == 0:
        # Only reachable for a 1-point draw, which the axis invariant forbids
        raise ZeroSignalError("Noise draw has zero power")
    draw *= np.sqrt(target / draw_power)

    return spectrum.with_intensity(spectrum.intensity + draw)


def realized_snr_db(clean: RamanSpectrum, noisy: RamanSpectrum) -> float:
    """Measured SNR of a noisy spectrum against its clean version."""
    residual = noisy.intensity - clean.intensity
    noise_power = float(np.mean(residual ** 2))
    if noise_power == 0:
        return float('inf')
    return 10.0 * np.log10(clean.power / noise_power)


def mixture_components(
    library: Dict[str, SubstanceProfile],
    label: MixtureLabel,
    settings: AcquisitionSettings,
    rng: Optional[np.random.Generator] = None,
    substance_order: Sequence[str] = config.SUBSTANCE_ORDER
) -> List[Tuple[SubstanceProfile, float]]:
    """(profile, weight) pairs for a class label, with optional weight jitter."""
    components = []
    for index, name in enumerate(substance_order):
        weight = 0.0
        if label.bits[index]:
            weight = settings.ratio_of(name)
            if rng is not None and settings.weight_jitter > 0:
                weight *= 1.0 + settings.weight_jitter * rng.uniform(-1.0, 1.0)
        components.append((library[name], weight))
    return components


def synth_clean_spectrum(
    library: Dict[str, SubstanceProfile],
    label: MixtureLabel,
    axis: SpectrumAxis,
    rng: np.random.Generator,
    settings: AcquisitionSettings = AcquisitionSettings()
) -> RamanSpectrum:
    """Mixture plus a random fluorescence background, before detector noise."""
    mixture = synth_mixture(mixture_components(library, label, settings, rng), axis)

    amp_lo, amp_hi = settings.fluorescence_amplitude_range
    width_lo, width_hi = settings.fluorescence_width_frac_range
    amplitude = rng.uniform(amp_lo, amp_hi) * float(np.max(mixture.intensity))
    center = rng.uniform(axis.start_cm1, axis.end_cm1)
    width = rng.uniform(width_lo, width_hi) * axis.span

    return add_fluorescence(mixture, amplitude, center, width)


def synth_raw_spectrum(
    library: Dict[str, SubstanceProfile],
    label: MixtureLabel,
    axis: SpectrumAxis,
    rng: np.random.Generator,
    settings: AcquisitionSettings = AcquisitionSettings(),
    snr_db: Optional[float] = None
) -> RamanSpectrum:
    """Simulate one acquisition: mixture, fluorescence, then white noise.

    Args:
        library: Substance profiles by name
        label: Class to simulate (non-empty)
        axis: Raman-shift grid
        rng: Per-sample generator
        settings: Acquisition variability
        snr_db: Noise level (default: settings.snr_db)

    Returns:
        Noisy spectrum labelled with the class
    """
    if label.is_empty:
        raise ProfileError("Cannot simulate a sample with no substances")

    clean = synth_clean_spectrum(library, label, axis, rng, settings)
    seed = int(rng.integers(0, 2 ** 63 - 1))
    level = settings.snr_db if snr_db is None else snr_db
    return add_noise_snr(clean, NoiseSpec(level, seed))


def generate_raw_set(
    library: Dict[str, SubstanceProfile],
    raw_counts: Dict[str, int],
    axis: SpectrumAxis,
    master_seed: int = config.RANDOM_SEED,
    settings: AcquisitionSettings = AcquisitionSettings(),
    n_workers: int = config.N_WORKERS,
    verbose: int = config.VERBOSITY
) -> List[RamanSpectrum]:
    """Simulate the raw acquisitions of every class.

    Args:
        library: Substance profiles by name
        raw_counts: Label bits -> number of raw spectra (e.g. config.RAW_COUNTS)
        axis: Raman-shift grid
        master_seed: Seed; sample k of class b uses the stream (master_seed, 'raw', b, k)
        settings: Acquisition variability
        n_workers: Worker threads
        verbose: Verbosity level (0=silent, 1=progress, 2=debug)

    Returns:
        Spectra grouped by class in raw_counts order
    """
    jobs = []
    for bits, count in raw_counts.items():
        if count < 0:
            raise ValueError(f"Raw count for class {bits} must be >= 0, got {count}")
        label = MixtureLabel.from_string(bits)
        jobs.extend((label, index) for index in range(count))

    if verbose >= 1:
        print(f"Simulating {len(jobs)} raw spectra across {len(raw_counts)} classes...")

    def simulate(job):
        label, index = job
        rng = derive_rng(master_seed, 'raw', label.to_string(), index)
        return synth_raw_spectrum(library, label, axis, rng, settings)

    return ordered_map(simulate, jobs, n_workers, verbose)


def generate_spectra_at_snr(
    library: Dict[str, SubstanceProfile],
    n_spectra: int,
    axis: SpectrumAxis,
    snr_range_db: Tuple[float, float],
    master_seed: int = config.RANDOM_SEED,
    stream: str = 'test',
    settings: AcquisitionSettings = AcquisitionSettings(),
    classes: Sequence[MixtureLabel] = MIXTURE_CLASSES,
    n_workers: int = config.N_WORKERS
) -> List[RamanSpectrum]:
    """Fresh spectra with classes assigned round-robin and SNR uniform in a range.

    Used for held-out test sets and the detection-time benchmark.

    Args:
        library: Substance profiles by name
        n_spectra: Number of spectra
        axis: Raman-shift grid
        snr_range_db: (low, high) noise level range
        master_seed: Seed
        stream: Name separating this set's random streams from the training data
        settings: Acquisition variability
        classes: Labels cycled through in order
        n_workers: Worker threads

    Returns:
        List of noisy spectra
    """
    low, high = snr_range_db
    if low > high:
        raise InvalidRangeError(f"SNR range low {low} exceeds high {high}")

    def simulate(index):
        rng = derive_rng(master_seed, stream, index)
        label = classes[index % len(classes)]
        snr_db = rng.uniform(low, high)
        return synth_raw_spectrum(library, label, axis, rng, settings, snr_db=snr_db)

    return ordered_map(simulate, list(range(n_spectra)), n_workers)


if __name__ == "__main__":
    # Add project root to path for standalone testing
    import sys
    from pathlib import Path
    sys.path.insert(0, str(Path(__file__).parent.parent.parent))

    from src.models.substances import load_substance_library

    print("=== Testing Spectrum Simulator ===\n")

    axis = make_axis(config.AXIS_START_CM1, config.AXIS_END_CM1, config.AXIS_N_POINTS)
    library = load_substance_library()
    print(f"Axis: {axis.start_cm1:.0f}-{axis.end_cm1:.0f} cm^-1, {axis.n_points} points, "
          f"spacing {axis.spacing:.4f}")

    rng = np.random.default_rng(config.RANDOM_SEED)
    for label in MIXTURE_CLASSES:
        clean = synth_clean_spectrum(library, label, axis, rng)
        noisy = add_noise_snr(clean, NoiseSpec(40.0, 7))
        print(f"  {label} {label.display_name():<48} realized SNR {realized_snr_db(clean, noisy):6.2f} dB")

    print("\n✓ Simulator checks complete")
