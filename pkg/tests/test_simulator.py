# ============================================================================
# tests/test_simulator.py
# ============================================================================
"""Tests for spectrum simulation."""

import numpy as np
import pytest

from src.data.simulator import (
    AcquisitionSettings,
    add_fluorescence,
    add_noise_snr,
    generate_raw_set,
    generate_spectra_at_snr,
    lorentzian,
    make_axis,
    realized_snr_db,
    synth_mixture,
    synth_pure,
    synth_raw_spectrum,
)
from src.errors import InvalidRangeError, ProfileError, ZeroSignalError
from src.models.label import MIXTURE_CLASSES, MixtureLabel
from src.models.spectrum import NoiseSpec, Peak, RamanSpectrum, SubstanceProfile


def test_axis_rejects_bad_bounds():
    """Test axis needs start < end and at least 2 points."""
    with pytest.raises(InvalidRangeError):
        make_axis(1800.0, 400.0, 100)
    with pytest.raises(InvalidRangeError):
        make_axis(400.0, 1800.0, 1)


def test_axis_spacing(axis):
    """Test grid spacing and endpoints."""
    values = axis.values
    assert values[0] == pytest.approx(400.0)
    assert values[-1] == pytest.approx(1800.0)
    assert axis.spacing == pytest.approx(1400.0 / 1023)


def test_lorentzian_shape():
    """Test unit height at the center and half height at +/- FWHM/2."""
    nu = np.array([990.0, 995.0, 1000.0, 1005.0])
    band = lorentzian(nu, 1000.0, 10.0)
    assert band[2] == pytest.approx(1.0)
    assert band[1] == pytest.approx(0.5)
    assert band[3] == pytest.approx(0.5)


def test_pure_spectrum_peaks_at_strongest_band(library, axis):
    """Test the pure oleic acid spectrum peaks at its strongest band."""
    profile = library['oleic_acid']
    spectrum = synth_pure(profile, axis)
    strongest = max(profile.peaks, key=lambda p: p.height)
    assert abs(axis.values[np.argmax(spectrum.intensity)] - strongest.center) <= 2 * axis.spacing
    assert spectrum.label == MixtureLabel.from_string('100')


def test_peak_outside_axis_rejected(axis):
    """Test a band center off the grid raises ProfileError."""
    profile = SubstanceProfile('stray', (Peak(2500.0, 1.0, 10.0),))
    with pytest.raises(ProfileError):
        synth_pure(profile, axis)


def test_mixture_label_is_union(library, axis):
    """Test mixture label covers every positive-weight component."""
    mix = synth_mixture([(library['oleic_acid'], 2.0), (library['retinyl_palmitate'], 1.0)], axis)
    assert mix.label.to_string() == '101'


def test_zero_weight_component_absent(library, axis):
    """Test weight 0 leaves the substance out of the spectrum and the label."""
    pure = synth_pure(library['palmitic_acid'], axis)
    mix = synth_mixture([(library['oleic_acid'], 0.0), (library['palmitic_acid'], 3.0)], axis)
    np.testing.assert_allclose(mix.intensity, pure.intensity)
    assert mix.label.to_string() == '010'


def test_mixture_weights_normalized(library, axis):
    """Test weights are normalized to sum to one."""
    a = synth_pure(library['oleic_acid'], axis).intensity
    b = synth_pure(library['palmitic_acid'], axis).intensity
    mix = synth_mixture([(library['oleic_acid'], 2.0), (library['palmitic_acid'], 1.0)], axis)
    np.testing.assert_allclose(mix.intensity, (2 * a + b) / 3)


def test_mixture_rejects_bad_weights(library, axis):
    """Test negative and all-zero weights."""
    with pytest.raises(ProfileError):
        synth_mixture([(library['oleic_acid'], -1.0)], axis)
    with pytest.raises(ProfileError):
        synth_mixture([(library['oleic_acid'], 0.0), (library['palmitic_acid'], 0.0)], axis)


def test_fluorescence_must_be_wideband(sample_spectrum):
    """Test narrow or negative backgrounds are rejected."""
    span = sample_spectrum.axis.span
    with pytest.raises(InvalidRangeError):
        add_fluorescence(sample_spectrum, 1.0, 1000.0, span / 8)
    with pytest.raises(InvalidRangeError):
        add_fluorescence(sample_spectrum, -1.0, 1000.0, span)


def test_fluorescence_adds_smooth_baseline(sample_spectrum):
    """Test the background adds its amplitude at the center and keeps the label."""
    center = sample_spectrum.axis.values[128]
    out = add_fluorescence(sample_spectrum, 2.0, center, sample_spectrum.axis.span)
    assert out.intensity[128] - sample_spectrum.intensity[128] == pytest.approx(2.0)
    assert out.label == sample_spectrum.label


@pytest.mark.parametrize('snr_db', [0.0, 20.0, 55.6])
def test_noise_hits_requested_snr(sample_spectrum, snr_db):
    """Test realized SNR equals the request."""
    noisy = add_noise_snr(sample_spectrum, NoiseSpec(snr_db, 99))
    assert realized_snr_db(sample_spectrum, noisy) == pytest.approx(snr_db, abs=1e-9)


def test_noise_calibration_over_augmentation_range(library):
    """Test 20 seeds at 4096 points land within 0.5 dB of every request in 30-60 dB."""
    axis = make_axis(400.0, 1800.0, 4096)
    clean = synth_mixture([(profile, 1.0) for profile in library.values()], axis)
    for snr_db in np.linspace(30.0, 60.0, 7):
        for seed in range(20):
            noisy = add_noise_snr(clean, NoiseSpec(float(snr_db), seed))
            assert abs(realized_snr_db(clean, noisy) - snr_db) <= 0.5


def test_noise_deterministic(sample_spectrum):
    """Test the same seed produces the same noise, another seed does not."""
    a = add_noise_snr(sample_spectrum, NoiseSpec(30.0, 5))
    b = add_noise_snr(sample_spectrum, NoiseSpec(30.0, 5))
    c = add_noise_snr(sample_spectrum, NoiseSpec(30.0, 6))
    np.testing.assert_array_equal(a.intensity, b.intensity)
    assert not np.array_equal(a.intensity, c.intensity)


def test_noise_on_zero_signal(small_axis):
    """Test a zero-power spectrum cannot be given an SNR."""
    silent = RamanSpectrum(small_axis, np.zeros(small_axis.n_points), MixtureLabel.from_string('100'))
    with pytest.raises(ZeroSignalError):
        add_noise_snr(silent, NoiseSpec(20.0, 1))


def test_raw_spectrum_rejects_empty_label(library, axis, rng):
    """Test a sample must contain a substance."""
    with pytest.raises(ProfileError):
        synth_raw_spectrum(library, MixtureLabel.from_string('000'), axis, rng)


def test_raw_set_counts_and_order(library, small_axis):
    """Test raw set size and class grouping follow the requested counts."""
    counts = {'100': 3, '011': 2}
    raw = generate_raw_set(library, counts, small_axis, master_seed=7, verbose=0)
    assert [s.label.to_string() for s in raw] == ['100'] * 3 + ['011'] * 2


def test_raw_set_independent_of_workers(library, small_axis):
    """Test thread fan-out does not change the output."""
    counts = {'100': 2, '110': 2, '111': 2}
    serial = generate_raw_set(library, counts, small_axis, master_seed=7, n_workers=1, verbose=0)
    threaded = generate_raw_set(library, counts, small_axis, master_seed=7, n_workers=4, verbose=0)
    for a, b in zip(serial, threaded):
        np.testing.assert_array_equal(a.intensity, b.intensity)


def test_raw_set_reproducible_and_seed_sensitive(library, small_axis):
    """Test same master seed -> same spectra; different seed -> different spectra."""
    a = generate_raw_set(library, {'101': 2}, small_axis, master_seed=1, verbose=0)
    b = generate_raw_set(library, {'101': 2}, small_axis, master_seed=1, verbose=0)
    c = generate_raw_set(library, {'101': 2}, small_axis, master_seed=2, verbose=0)
    np.testing.assert_array_equal(a[1].intensity, b[1].intensity)
    assert not np.array_equal(a[1].intensity, c[1].intensity)


def test_spectra_at_snr_round_robin(library, small_axis):
    """Test classes cycle in order."""
    spectra = generate_spectra_at_snr(library, 9, small_axis, (20.0, 30.0), master_seed=3)
    expected = [MIXTURE_CLASSES[i % 7] for i in range(9)]
    assert [s.label for s in spectra] == expected


def test_spectra_at_snr_bad_range(library, small_axis):
    """Test a reversed SNR range."""
    with pytest.raises(InvalidRangeError):
        generate_spectra_at_snr(library, 2, small_axis, (30.0, 20.0))


def test_acquisition_ratio_default():
    """Test unknown substances mix at weight 1."""
    settings = AcquisitionSettings()
    assert settings.ratio_of('oleic_acid') == 2.0
    assert settings.ratio_of('unknown') == 1.0
