# ============================================================================
# tests/test_transforms.py
# ============================================================================
"""Tests for STFT, Wigner-Ville and CWT maps and scale images."""

import numpy as np
import pytest
from scipy import signal as sps

from src.errors import InvalidRangeError, SignalLengthError
from src.models.label import MixtureLabel
from src.transforms import TransformSettings, compute_map, spectrum_to_image
from src.transforms.cwt import cwt, default_wavelet_spec, mexican_hat, morlet
from src.transforms.maps import TFMap, WaveletSpec
from src.transforms.scale_image import min_max_normalize, resize_bilinear, to_scale_image
from src.transforms.stft import stft
from src.transforms.wvd import wvd


# ============================================================================
# STFT
# ============================================================================

def test_stft_zero_signal():
    tfmap = stft(np.zeros(256))
    assert tfmap.kind == 'stft_power'
    assert np.all(tfmap.values == 0)


def test_stft_shape():
    """Test one-sided rows and ceil(N / hop) frames."""
    tfmap = stft(np.ones(250), window_len=64, hop=16)
    assert tfmap.shape == (33, 16)
    assert tfmap.col_axis[1] - tfmap.col_axis[0] == 16


def test_stft_bin_aligned_tone_no_leakage():
    """Test a full-frame cosine at bin k puts all power in bin k."""
    window_len, k = 64, 5
    n = np.arange(512)
    x = np.cos(2 * np.pi * k * n / window_len)
    tfmap = stft(x, window_len=window_len, hop=16, window='rect')

    column = tfmap.values[:, 8]  # centred on sample 128, fully inside
    assert np.argmax(column) == k
    others = np.delete(column, k)
    assert others.max() <= 1e-10 * column[k]


def test_stft_parseval_per_frame():
    """Test one-sided power sums to window_len * windowed frame energy."""
    rng = np.random.default_rng(0)
    x = rng.standard_normal(256)
    window_len, hop = 64, 16
    tfmap = stft(x, window_len=window_len, hop=hop, window='hann')

    frame_index = 6
    tau = frame_index * hop
    g = sps.get_window('hann', window_len, fftbins=True)
    frame = x[tau - window_len // 2: tau + window_len // 2] * g

    p = tfmap.values[:, frame_index]
    total = p[0] + 2 * p[1:-1].sum() + p[-1]
    assert total == pytest.approx(window_len * np.sum(frame ** 2), rel=1e-10)


def test_stft_tradeoff_structure():
    """Test doubling window and hop halves frames and doubles frequency resolution."""
    x = np.ones(256)
    short = stft(x, window_len=32, hop=8)
    long = stft(x, window_len=64, hop=16)
    assert long.shape[1] * 2 == short.shape[1]
    assert (long.shape[0] - 1) == 2 * (short.shape[0] - 1)


def test_stft_window_too_long():
    with pytest.raises(SignalLengthError):
        stft(np.ones(32), window_len=64)


def test_stft_unknown_window():
    with pytest.raises(ValueError):
        stft(np.ones(128), window='blackmanish')


# ============================================================================
# Wigner-Ville
# ============================================================================

def test_wvd_zero_signal():
    tfmap = wvd(np.zeros(64))
    assert tfmap.shape == (64, 64)
    assert np.all(tfmap.values == 0)


@pytest.mark.parametrize('length', [2, 63])
def test_wvd_rejects_odd_or_short(length):
    with pytest.raises(SignalLengthError):
        wvd(np.ones(length))


def test_wvd_row_frequencies():
    """Test row k sits at k / (2N) cycles/sample."""
    tfmap = wvd(np.ones(128))
    assert tfmap.row_axis[64] == pytest.approx(0.25)


def test_wvd_chirp_ridge_slope():
    """Test the ridge of a linear chirp follows its instantaneous frequency."""
    n = 256
    f0, rate = 0.1, 0.2 / n
    t = np.arange(n)
    x = np.cos(2 * np.pi * (f0 * t + 0.5 * rate * t ** 2))
    tfmap = wvd(x)

    cols = np.arange(64, 192)
    ridge = tfmap.row_axis[np.argmax(tfmap.values[:, cols], axis=0)]
    slope = np.polyfit(cols, ridge, 1)[0]
    assert slope == pytest.approx(rate, rel=0.05)


def test_wvd_two_tone_cross_term():
    """Test two tones leave energy midway between them."""
    n = 256
    t = np.arange(n)
    k1, k2 = 64, 192  # rows of 0.125 and 0.375 cycles/sample
    x = np.cos(2 * np.pi * k1 * t / (2 * n)) + np.cos(2 * np.pi * k2 * t / (2 * n))
    values = wvd(x).values

    cols = slice(64, 192)
    tone = np.abs(values[k1, cols]).sum()
    mid = np.abs(values[(k1 + k2) // 2, cols]).sum()
    assert mid >= 0.1 * tone


def test_wvd_single_tone_concentration():
    """Test a tone keeps at least 80% of column energy within 2 rows."""
    n = 256
    k = 64
    x = np.cos(2 * np.pi * k * np.arange(n) / (2 * n))
    values = wvd(x).values

    for col in (64, 128, 192):
        energy = values[:, col] ** 2
        assert energy[k - 2:k + 3].sum() >= 0.8 * energy.sum()


# ============================================================================
# CWT
# ============================================================================

def test_default_scale_grid():
    spec = default_wavelet_spec(1024)
    assert spec.scale_min == pytest.approx(6 * 4 / (2 * np.pi))
    assert spec.scale_max == pytest.approx(6 * 256 / (2 * np.pi))
    assert len(spec.scales) == 64


def test_cwt_zero_signal():
    tfmap = cwt(np.zeros(128))
    assert tfmap.kind == 'cwt_magnitude'
    assert np.all(tfmap.values == 0)


@pytest.mark.parametrize('family,wavelet', [
    ('morlet', lambda u: morlet(u, 6.0)),
    ('mexican_hat', mexican_hat),
])
def test_cwt_impulse_response(family, wavelet):
    """Test an impulse reproduces the scaled wavelet at three scales."""
    n, t0 = 128, 64
    x = np.zeros(n)
    x[t0] = 1.0
    spec = WaveletSpec(family, 6.0, 3, 2.0, 8.0)
    tfmap = cwt(x, spec)

    b = np.arange(n)
    for row, a in enumerate(spec.scales):
        half = int(np.ceil(5.0 * a))
        expected = np.abs(wavelet((t0 - b) / a)) / np.sqrt(a)
        expected[np.abs(t0 - b) > half] = 0.0
        np.testing.assert_allclose(tfmap.values[row], expected, atol=1e-10)


@pytest.mark.parametrize('family', ['morlet', 'mexican_hat'])
def test_cwt_sinusoid_ridge_scale(family):
    """Test per-scale energy of a sinusoid peaks at the predicted scale."""
    n, period = 1024, 32.0
    x = np.cos(2 * np.pi * np.arange(n) / period)
    spec = default_wavelet_spec(n, family=family)
    values = cwt(x, spec).values[:, n // 4: 3 * n // 4]

    energy = (values ** 2).sum(axis=1)
    best = spec.scales[np.argmax(energy)]
    if family == 'morlet':
        predicted = 6.0 * period / (2 * np.pi)
    else:
        predicted = np.sqrt(2.5) * period / (2 * np.pi)
    step = np.log(spec.scales[1] / spec.scales[0])
    assert abs(np.log(best / predicted)) <= step


def test_cwt_linearity():
    rng = np.random.default_rng(3)
    x = rng.standard_normal(256)
    np.testing.assert_allclose(cwt(3.0 * x).values, 3.0 * cwt(x).values, rtol=1e-9, atol=1e-12)


def test_cwt_shift_covariance():
    """Test shifting a bump moves each small-scale row argmax with it."""
    n = 1024
    t = np.arange(n)
    bump = np.exp(-0.5 * ((t - 300) / 3.0) ** 2)
    shifted = np.roll(bump, 17)
    a = cwt(bump).values
    b = cwt(shifted).values
    for row in (5, 10, 20):
        assert abs(np.argmax(b[row]) - np.argmax(a[row]) - 17) <= 1


def test_cwt_scale_longer_than_signal():
    with pytest.raises(SignalLengthError):
        cwt(np.ones(64), WaveletSpec('morlet', 6.0, 4, 2.0, 100.0))


def test_cwt_too_short():
    with pytest.raises(SignalLengthError):
        cwt(np.ones(7))


def test_wavelet_spec_validation():
    with pytest.raises(InvalidRangeError):
        WaveletSpec('morlet', 6.0, 1, 1.0, 2.0)
    with pytest.raises(InvalidRangeError):
        WaveletSpec('morlet', 6.0, 4, 3.0, 2.0)
    with pytest.raises(ValueError):
        WaveletSpec('haar', 6.0, 4, 1.0, 2.0)


@pytest.mark.parametrize('kind', ['stft', 'wvd', 'cwt'])
def test_transforms_are_pure(kind):
    """Test identical input gives bit-identical output."""
    rng = np.random.default_rng(11)
    x = rng.standard_normal(256)
    settings = TransformSettings(kind=kind)
    np.testing.assert_array_equal(compute_map(x, settings).values, compute_map(x.copy(), settings).values)


# ============================================================================
# Maps and scale images
# ============================================================================

def test_tfmap_rejects_negative_power():
    with pytest.raises(ValueError):
        TFMap(-np.ones((2, 2)), [0, 1], [0, 1], 'stft_power')
    TFMap(-np.ones((2, 2)), [0, 1], [0, 1], 'wvd')


def test_constant_map_gives_zero_image():
    tfmap = TFMap(np.full((5, 7), 3.0), np.arange(5), np.arange(7), 'cwt_magnitude')
    image = to_scale_image(tfmap, MixtureLabel.from_string('100'), 4, 4)
    assert np.all(image.pixels == 0)


def test_resize_identity():
    rng = np.random.default_rng(5)
    values = min_max_normalize(rng.random((6, 9)))
    np.testing.assert_allclose(resize_bilinear(values, 6, 9), values, atol=1e-12)


def test_bilinear_center_is_corner_mean():
    values = np.array([[1.0, 2.0], [3.0, 8.0]])
    resized = resize_bilinear(values, 3, 3)
    assert resized[1, 1] == pytest.approx(values.mean())


def test_resize_rejects_tiny_target():
    with pytest.raises(ValueError):
        resize_bilinear(np.ones((4, 4)), 1, 4)


@pytest.mark.parametrize('kind', ['stft', 'wvd', 'cwt'])
def test_spectrum_to_image(sample_spectrum, kind):
    """Test every transform yields a full-range image of the configured size."""
    settings = TransformSettings(kind=kind, image_height=32, image_width=48)
    image = spectrum_to_image(sample_spectrum, settings)
    assert image.shape == (32, 48)
    assert image.pixels.min() == 0.0
    assert image.pixels.max() == pytest.approx(1.0)
    assert image.label == sample_spectrum.label


def test_unknown_transform_kind():
    with pytest.raises(ValueError):
        TransformSettings(kind='hht')
