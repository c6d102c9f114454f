# ============================================================================
# tests/test_network.py
# ============================================================================
"""Tests for MDNN layers, loss, training and checkpoints."""

import numpy as np
import pytest
from scipy import signal as sps
from scipy.special import expit

from src.data.dataset import DatasetItem, LabeledDataset
from src.errors import CheckpointError, DivergenceError, InvalidRangeError, ShapeMismatchError
from src.models.label import MixtureLabel
from src.network.checkpoint import (
    decode_checkpoint,
    encode_checkpoint,
    load_checkpoint,
    save_checkpoint,
)
from src.network.inference import predict_labels, predict_scores, threshold_scores
from src.network.layers import Conv2d, GlobalAvgPool, MaxPool2d
from src.network.loss import bce_loss
from src.network.model import (
    ModelConfig,
    build_model,
    count_parameters,
    flatten_head_parameter_count,
    gap_head_parameter_count,
)
from src.network.training import STOP_EARLY, TrainConfig, fit, train_step
from src.transforms.maps import ScaleImage

FD_EPSILON = 1e-4


@pytest.fixture
def tiny_config():
    """8x8 input, three modules of one 1-filter convolution."""
    return ModelConfig(input_hw=(8, 8), convs_per_module=[1, 1, 1], filters_per_module=[1, 1, 1],
                       dense_units=[4], n_labels=3)


@pytest.fixture
def tiny_model(tiny_config):
    model = build_model(tiny_config, seed=3)
    rng = np.random.default_rng(8)
    # Non-zero biases so no unit sits exactly on a ReLU kink
    model.set_parameters([a + 0.1 * rng.standard_normal(a.shape) + (0.1 if a.ndim == 1 else 0.0)
                          for a in model.get_parameters()])
    return model


def _relative_error(analytic, numeric):
    return np.abs(analytic - numeric) / np.maximum(np.abs(analytic) + np.abs(numeric), 1e-7)


# ============================================================================
# Layers
# ============================================================================

def test_conv_matches_cross_correlation():
    """Test a single-channel convolution against scipy same-mode correlation."""
    rng = np.random.default_rng(0)
    conv = Conv2d(1, 1, 3, rng)
    conv.params['bias'] = np.array([0.25])
    x = rng.standard_normal((1, 1, 6, 7))
    out = conv.forward(x)
    expected = sps.correlate2d(x[0, 0], conv.params['weight'][0, 0], mode='same') + 0.25
    np.testing.assert_allclose(out[0, 0], expected, atol=1e-12)


def test_conv_rejects_even_kernel():
    with pytest.raises(ShapeMismatchError):
        Conv2d(1, 1, 2, np.random.default_rng(0))


def test_maxpool_routes_gradient_to_argmax():
    """Test each window sends its gradient only to its largest input."""
    pool = MaxPool2d(2)
    x = np.array([[[[1.0, 4.0, 0.0, 0.5],
                    [2.0, 3.0, 0.1, 0.2],
                    [9.0, 8.0, 5.0, 6.0],
                    [7.0, 6.0, 7.0, 8.0]]]])
    out = pool.forward(x)
    np.testing.assert_array_equal(out[0, 0], [[4.0, 0.5], [9.0, 8.0]])

    dx = pool.backward(np.array([[[[10.0, 20.0], [30.0, 40.0]]]]))
    expected = np.zeros((4, 4))
    expected[0, 1] = 10.0
    expected[0, 3] = 20.0
    expected[2, 0] = 30.0
    expected[3, 3] = 40.0
    np.testing.assert_array_equal(dx[0, 0], expected)


def test_maxpool_tie_goes_to_first():
    pool = MaxPool2d(2)
    pool.forward(np.ones((1, 1, 2, 2)))
    dx = pool.backward(np.ones((1, 1, 1, 1)))
    np.testing.assert_array_equal(dx[0, 0], [[1.0, 0.0], [0.0, 0.0]])


def test_maxpool_odd_size():
    with pytest.raises(ShapeMismatchError):
        MaxPool2d(2).forward(np.zeros((1, 1, 3, 4)))


def test_global_average_pool():
    gap = GlobalAvgPool()
    x = np.arange(2 * 3 * 2 * 2, dtype=float).reshape(2, 3, 2, 2)
    out = gap.forward(x)
    np.testing.assert_allclose(out, x.mean(axis=(2, 3)))
    dx = gap.backward(np.ones((2, 3)))
    np.testing.assert_allclose(dx, np.full(x.shape, 0.25))


# ============================================================================
# Loss
# ============================================================================

def test_bce_at_one_half_is_ln2():
    loss, grad = bce_loss(np.full((4, 3), 0.5), np.eye(4, 3))
    assert loss == pytest.approx(np.log(2.0))
    np.testing.assert_allclose(grad, (0.5 - np.eye(4, 3)) / 12)


def test_bce_clamps_saturated_probabilities():
    loss, _ = bce_loss(np.array([[0.0, 1.0]]), np.array([[1.0, 0.0]]))
    assert np.isfinite(loss)
    assert loss == pytest.approx(-np.log(1e-7), rel=1e-6)


def test_bce_gradient_matches_finite_differences():
    """Test the logit gradient on a random 2x3 case."""
    rng = np.random.default_rng(4)
    logits = rng.standard_normal((2, 3))
    targets = (rng.random((2, 3)) > 0.5).astype(float)
    _, grad = bce_loss(expit(logits), targets)

    numeric = np.zeros_like(logits)
    for idx in np.ndindex(logits.shape):
        plus, minus = logits.copy(), logits.copy()
        plus[idx] += FD_EPSILON
        minus[idx] -= FD_EPSILON
        numeric[idx] = (bce_loss(expit(plus), targets)[0] - bce_loss(expit(minus), targets)[0]) / (2 * FD_EPSILON)
    assert _relative_error(grad, numeric).max() <= 1e-5


def test_bce_shape_mismatch():
    with pytest.raises(ShapeMismatchError):
        bce_loss(np.zeros((2, 3)), np.zeros((3, 2)))


# ============================================================================
# Model
# ============================================================================

def test_every_parameter_gradient_matches_finite_differences(tiny_model):
    """Test backprop against central differences for every layer kind.

    Every entry of every convolution kernel is checked; other arrays are sampled.
    """
    rng = np.random.default_rng(5)
    x = rng.random((2, 1, 8, 8))
    y = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 0.0]])

    def loss_value():
        return bce_loss(tiny_model.forward(x, cache=False), y)[0]

    _, grad_logits = bce_loss(tiny_model.forward(x), y)
    tiny_model.backward_from_logits(grad_logits)
    analytic = {(i, name): g.copy() for i, name, g in tiny_model.gradients()}

    for index, name, array in tiny_model.parameters():
        flat = array.reshape(-1)
        if array.ndim == 4:
            picks = range(flat.size)
        else:
            picks = rng.choice(flat.size, size=min(flat.size, 6), replace=False)
        for p in picks:
            original = flat[p]
            flat[p] = original + FD_EPSILON
            up = loss_value()
            flat[p] = original - FD_EPSILON
            down = loss_value()
            flat[p] = original
            numeric = (up - down) / (2 * FD_EPSILON)
            assert _relative_error(analytic[(index, name)].reshape(-1)[p], numeric) <= 1e-3, \
                f"layer {index} {name}[{p}]"


def test_input_gradient_matches_finite_differences(tiny_model):
    rng = np.random.default_rng(6)
    x = rng.random((1, 1, 8, 8))
    y = np.array([[0.0, 1.0, 1.0]])
    _, grad_logits = bce_loss(tiny_model.forward(x), y)
    dx = tiny_model.backward_from_logits(grad_logits)

    for idx in [(0, 0, 0, 0), (0, 0, 3, 5), (0, 0, 7, 2)]:
        plus, minus = x.copy(), x.copy()
        plus[idx] += FD_EPSILON
        minus[idx] -= FD_EPSILON
        numeric = (bce_loss(tiny_model.forward(plus, cache=False), y)[0]
                   - bce_loss(tiny_model.forward(minus, cache=False), y)[0]) / (2 * FD_EPSILON)
        assert _relative_error(dx[idx], numeric) <= 1e-3


def test_shape_chain_error_names_module():
    """Test a side that cannot be halved again is reported at its module."""
    with pytest.raises(ShapeMismatchError, match='module 3'):
        ModelConfig(input_hw=(12, 12), convs_per_module=[1, 1, 1], filters_per_module=[2, 2, 2])


def test_fixed_kernel_and_pool():
    with pytest.raises(ValueError):
        ModelConfig(kernel_size=5)
    with pytest.raises(ValueError):
        ModelConfig(pool_size=3)


def test_default_model_shape_and_determinism():
    """Test default architecture maps 64x64 images to 3 sigmoid outputs."""
    a = build_model(seed=7)
    b = build_model(seed=7)
    x = np.random.default_rng(0).random((2, 64, 64))
    out = a.forward(x[:, None])
    assert out.shape == (2, 3)
    assert np.all((out > 0) & (out < 1))
    np.testing.assert_array_equal(out, b.forward(x[:, None]))


def test_gap_head_is_smaller_than_flatten(tiny_config):
    """Test pooling shrinks the dense stack and counts add up."""
    default = ModelConfig()
    assert gap_head_parameter_count(default) < flatten_head_parameter_count(default)
    model = build_model(tiny_config)
    conv_params = 3 * (9 + 1)
    assert count_parameters(model) == conv_params + gap_head_parameter_count(tiny_config)


def test_predictions_threshold(tiny_model):
    image = np.random.default_rng(1).random((8, 8))
    label, scores = predict_labels(tiny_model, image, threshold=0.5)
    assert label.bits == tuple(scores >= 0.5)
    empty, _ = predict_labels(tiny_model, image, threshold=1.01)
    assert empty.is_empty


def test_predict_scores_leaves_model_untouched(tiny_model):
    """Test inference keeps no activations and is batch-size independent."""
    x = np.random.default_rng(2).random((5, 8, 8))
    a = predict_scores(tiny_model, x, batch_size=2)
    b = predict_scores(tiny_model, x, batch_size=5)
    np.testing.assert_allclose(a, b, atol=1e-12)
    assert all(getattr(layer, '_windows', None) is None for layer in tiny_model.layers)
    np.testing.assert_array_equal(threshold_scores(np.array([0.5, 0.49])), [True, False])


# ============================================================================
# Training
# ============================================================================

def _constant_dataset(value, bits, n, shape=(8, 8)):
    label = MixtureLabel.from_string(bits)
    return [DatasetItem(ScaleImage(np.full(shape, value), 'cwt', label), label, f"{bits}:{i}")
            for i in range(n)]


def test_train_config_validation():
    with pytest.raises(InvalidRangeError):
        TrainConfig(learning_rate=0.0)
    with pytest.raises(InvalidRangeError):
        TrainConfig(patience_epochs=0)


def test_zero_learning_rate_keeps_weights(tiny_model):
    before = tiny_model.get_parameters()
    x = np.random.default_rng(3).random((2, 8, 8))
    loss = train_step(tiny_model, x, np.array([[1.0, 0, 0], [0, 1.0, 0]]), 0.0)
    assert np.isfinite(loss)
    for a, b in zip(before, tiny_model.get_parameters()):
        np.testing.assert_array_equal(a, b)


def test_small_steps_do_not_increase_loss(tiny_model):
    """Test two SGD steps on one sample with a small learning rate descend (1% slack)."""
    x = np.random.default_rng(4).random((1, 8, 8))
    y = np.array([[1.0, 0.0, 1.0]])
    losses = [train_step(tiny_model, x, y, 1e-3) for _ in range(3)]
    assert losses[1] <= losses[0] * 1.01
    assert losses[2] <= losses[1] * 1.01


def test_fit_is_deterministic(tiny_config):
    """Test the same seeds give an identical epoch history and identical weights."""
    items = _constant_dataset(1.0, '100', 6) + _constant_dataset(0.5, '011', 6)
    dataset = LabeledDataset(items)
    tcfg = TrainConfig(learning_rate=0.05, max_epochs=3, batch_size=4, loss_tolerance=0.0, seed=11)

    runs = []
    for _ in range(2):
        model = build_model(tiny_config, seed=2)
        report = fit(model, dataset, dataset, tcfg, verbose=0)
        runs.append((report.to_frame().to_csv(index=False, float_format='%.12g'), model.get_parameters()))

    assert runs[0][0] == runs[1][0]
    for a, b in zip(runs[0][1], runs[1][1]):
        np.testing.assert_array_equal(a, b)


def test_non_finite_loss_raises(tiny_model):
    params = tiny_model.get_parameters()
    params[-1] = np.full_like(params[-1], np.nan)
    tiny_model.set_parameters(params)
    with pytest.raises(DivergenceError):
        train_step(tiny_model, np.zeros((1, 8, 8)), np.array([[1.0, 0, 0]]), 0.01)


def test_zero_images_stop_early(tiny_config):
    """Test a constant-zero dataset plateaus and stops within patience + 2 epochs."""
    model = build_model(tiny_config, seed=0)
    train = LabeledDataset(_constant_dataset(0.0, '100', 4))
    val = LabeledDataset(_constant_dataset(0.0, '100', 2))
    tcfg = TrainConfig(learning_rate=1e-3, momentum=0.0, max_epochs=10, patience_epochs=2,
                       loss_tolerance=1e-4, batch_size=32)
    report = fit(model, train, val, tcfg, verbose=0)
    assert report.stop_reason == STOP_EARLY
    assert report.n_epochs <= tcfg.patience_epochs + 2


def test_fit_restores_best_weights(tiny_config):
    """Test the returned model scores the best recorded validation loss."""
    model = build_model(tiny_config, seed=1)
    items = _constant_dataset(1.0, '100', 6) + _constant_dataset(0.0, '010', 6)
    dataset = LabeledDataset(items)
    tcfg = TrainConfig(learning_rate=0.1, momentum=0.0, max_epochs=5, loss_tolerance=0.0, batch_size=4)
    report = fit(model, dataset, dataset, tcfg, verbose=0)

    assert report.best_val_loss < report.epochs[0].val_loss
    scores = predict_scores(model, dataset.images_array())
    loss, _ = bce_loss(scores, dataset.labels_array())
    assert loss == pytest.approx(report.best_val_loss, rel=1e-9)


def test_zero_epochs_returns_empty_report(tiny_config):
    model = build_model(tiny_config)
    report = fit(model, LabeledDataset(), LabeledDataset(), TrainConfig(max_epochs=0), verbose=0)
    assert report.n_epochs == 0
    assert report.to_frame().empty


# ============================================================================
# Checkpoints
# ============================================================================

def test_checkpoint_round_trip(tmp_path, tiny_model):
    """Test a reloaded model reproduces predictions to float32 precision."""
    path = tmp_path / 'model.mdnn'
    n_bytes = save_checkpoint(tiny_model, path)
    assert n_bytes == path.stat().st_size

    loaded = load_checkpoint(path)
    assert loaded.config == tiny_model.config
    x = np.random.default_rng(9).random((3, 8, 8))
    np.testing.assert_allclose(predict_scores(loaded, x), predict_scores(tiny_model, x), atol=1e-5)


@pytest.mark.parametrize('seed', [0, 12345, 2 ** 63 + 5])
def test_checkpoint_keeps_seed(tiny_config, seed):
    model = build_model(tiny_config, seed=seed)
    assert decode_checkpoint(encode_checkpoint(model)).seed == seed


def test_checkpoint_bad_magic(tiny_model):
    data = b'NOPE' + encode_checkpoint(tiny_model)[4:]
    with pytest.raises(CheckpointError):
        decode_checkpoint(data)


def test_checkpoint_truncated(tiny_model):
    data = encode_checkpoint(tiny_model)
    with pytest.raises(CheckpointError):
        decode_checkpoint(data[:-3])


def test_checkpoint_trailing_bytes(tiny_model):
    with pytest.raises(CheckpointError):
        decode_checkpoint(encode_checkpoint(tiny_model) + b'\x00\x00')
