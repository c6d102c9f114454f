# ============================================================================
# tests/test_pipeline.py
# ============================================================================
"""Tests for the experiment configuration, pipeline commands and CLI."""

import json

import numpy as np
import pandas as pd
import pytest

from main import EXIT_CONFIG, EXIT_DATA, EXIT_OTHER, categorize, main
from src.analysis.metrics import all_positive_baseline
from src.analysis.report import evaluate, metrics_not_beating
from src.data.dataset import load_dataset
from src.data.formats import write_spectrum_csv
from src.errors import ConfigError, DivergenceError, TruncatedTensorError
from src.network.checkpoint import load_checkpoint, save_checkpoint
from src.network.model import build_model
from src.simulation import (
    cmd_bench,
    cmd_eval,
    cmd_gen,
    cmd_train,
    cmd_transform,
    load_pipeline_config,
    pipeline_config_from_dict,
)

TINY_COUNTS = {'100': 2, '010': 2, '001': 2, '110': 2, '011': 2, '101': 2, '111': 2}


def tiny_config_dict(out_dir, **overrides):
    """Smallest configuration that runs every command in a few seconds."""
    data = {
        'seed': 5,
        'output_dir': str(out_dir),
        'target_per_class': 6,
        'axis': {'start_cm1': 400.0, 'end_cm1': 1800.0, 'n_points': 256},
        'substances': {'raw_counts': dict(TINY_COUNTS)},
        'transform': {'kind': 'stft', 'image_height': 16, 'image_width': 16},
        'model': {'convs_per_module': [1, 1], 'filters_per_module': [2, 2], 'dense_units': [4]},
        'train': {'max_epochs': 1, 'batch_size': 8},
        'eval': {'test_set_size': 14},
        'bench': {'n_spectra': 3, 'warmup': 1},
    }
    data.update(overrides)
    return data


@pytest.fixture
def tiny_cfg(tmp_path):
    return pipeline_config_from_dict(tiny_config_dict(tmp_path / 'run'))


@pytest.fixture
def config_file(tmp_path):
    """Write a tiny configuration to disk and return its path."""
    def write(**overrides):
        path = tmp_path / 'exp.json'
        path.write_text(json.dumps(tiny_config_dict(tmp_path / 'run', **overrides)))
        return str(path)
    return write


# ============================================================================
# Configuration
# ============================================================================

def test_defaults_match_desk_experiment():
    cfg = pipeline_config_from_dict({})
    assert cfg.target_per_class == 360
    assert cfg.transform.kind == 'cwt'
    assert tuple(cfg.model.input_hw) == (64, 64)
    assert cfg.eval.test_set_size == 700
    assert sum(cfg.substances.raw_counts.values()) > 7


def test_model_input_follows_image_size(tiny_cfg):
    assert tuple(tiny_cfg.model.input_hw) == (16, 16)
    assert tiny_cfg.augment.seed == 5
    assert tiny_cfg.train.seed == 5


def test_invalid_value_names_dotted_path():
    with pytest.raises(ConfigError, match=r'augment\.max_shift_frac'):
        pipeline_config_from_dict({'augment': {'max_shift_frac': 0.3}})


def test_unknown_key_names_dotted_path():
    with pytest.raises(ConfigError, match=r'train\.lr'):
        pipeline_config_from_dict({'train': {'lr': 0.1}})
    with pytest.raises(ConfigError, match='colour'):
        pipeline_config_from_dict({'colour': 'red'})


def test_cross_section_checks(tmp_path):
    """Test model size, target count and label width are checked together."""
    with pytest.raises(ConfigError, match='model.input_hw'):
        pipeline_config_from_dict({'model': {'input_hw': [32, 32]}})
    with pytest.raises(ConfigError, match='target_per_class'):
        pipeline_config_from_dict(tiny_config_dict(tmp_path, target_per_class=1))


def test_overrides_reseed(tiny_cfg):
    cfg = tiny_cfg.with_overrides(seed=9, transform='wvd', threshold=0.3)
    assert cfg.seed == 9 and cfg.augment.seed == 9 and cfg.train.seed == 9
    assert cfg.transform.kind == 'wvd'
    assert cfg.eval.threshold == 0.3


def test_config_round_trip(tmp_path, tiny_cfg):
    path = tmp_path / 'saved.json'
    path.write_text(json.dumps(tiny_cfg.to_dict()))
    assert load_pipeline_config(path).to_dict() == tiny_cfg.to_dict()


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_pipeline_config(tmp_path / 'absent.json')


# ============================================================================
# Commands
# ============================================================================

def test_gen_train_eval_bench(tiny_cfg):
    """Test the full command chain on a tiny configuration."""
    dataset_dir = cmd_gen(tiny_cfg, test_set=True, verbose=0)
    out = tiny_cfg.output_path
    assert (out / 'config.json').exists()
    assert len(list((out / 'raw').glob('*.csv'))) == sum(TINY_COUNTS.values())

    dataset = load_dataset(dataset_dir)
    assert set(dataset.class_counts.values()) == {6}
    assert dataset.image_shape == (16, 16)
    test = load_dataset(out / 'test')
    assert len(test) == 14
    assert set(test.class_counts.values()) == {2}

    checkpoint, report = cmd_train(tiny_cfg, verbose=0)
    assert checkpoint.exists()
    assert report.n_epochs == 1
    summary = json.loads((out / 'train_summary.json').read_text())
    assert summary['n_train'] == 35 and summary['n_val'] == 7

    metrics = cmd_eval(tiny_cfg, verbose=0)
    assert metrics.n_samples == 14
    assert set(metrics.auc) == set(tiny_cfg.substances.order)
    frame = pd.read_csv(out / 'eval' / 'metrics.csv')
    assert 'hamming_loss' in set(frame['metric'])
    assert (out / 'eval' / 'baseline_metrics.csv').exists()
    assert (out / 'eval' / 'roc.png').read_bytes().startswith(b'\x89PNG')

    result = cmd_bench(tiny_cfg, verbose=0)
    assert result.n_spectra == 3
    assert result.per_spectrum_ms > 0
    assert result.model_file_bytes == checkpoint.stat().st_size


def test_gen_is_reproducible(tmp_path):
    """Test the same seed writes identical datasets."""
    a = pipeline_config_from_dict(tiny_config_dict(tmp_path / 'a'))
    b = pipeline_config_from_dict(tiny_config_dict(tmp_path / 'b', n_workers=3))
    da = load_dataset(cmd_gen(a, verbose=0))
    db = load_dataset(cmd_gen(b, verbose=0))
    np.testing.assert_array_equal(da.images_array(), db.images_array())


def test_same_seed_writes_identical_reports(tmp_path):
    """Test two full runs with one seed write byte-identical training and metric CSVs."""
    runs = []
    for name in ('a', 'b'):
        cfg = pipeline_config_from_dict(tiny_config_dict(tmp_path / name, train={'max_epochs': 2, 'batch_size': 8}))
        cmd_gen(cfg, test_set=True, verbose=0)
        cmd_train(cfg, verbose=0)
        cmd_eval(cfg, verbose=0)
        runs.append(cfg.output_path)

    a, b = runs
    compared = ['train_report.csv', 'eval/metrics.csv', 'eval/baseline_metrics.csv']
    compared += [f"eval/{p.name}" for p in sorted((a / 'eval').glob('roc_label_*.csv'))]
    assert len(compared) > 3
    for relative in compared:
        assert (a / relative).read_bytes() == (b / relative).read_bytes(), relative
    assert (a / 'model.mdnn').read_bytes() == (b / 'model.mdnn').read_bytes()


def test_zero_epochs_saves_initial_weights(tmp_path):
    """Test max_epochs 0 writes a checkpoint and an empty loss history."""
    cfg = pipeline_config_from_dict(tiny_config_dict(tmp_path, train={'max_epochs': 0}))
    cmd_gen(cfg, verbose=0)
    checkpoint, report = cmd_train(cfg, verbose=0)
    assert report.n_epochs == 0
    assert load_checkpoint(checkpoint).config == cfg.model
    history = pd.read_csv(tmp_path / 'train_report.csv')
    assert history.empty
    assert list(history.columns) == ['epoch', 'train_loss', 'val_loss', 'val_hamming']


def test_transform_from_label_and_csv(tmp_path, tiny_cfg, sample_spectrum):
    """Test both spectrum sources produce a PGM of the configured size."""
    pgm = cmd_transform(tiny_cfg, tmp_path / 'label.pgm', label_bits='011', verbose=0)
    assert pgm.read_bytes().startswith(b'P5\n16 16\n255\n')

    csv_path = tmp_path / 's.csv'
    write_spectrum_csv(csv_path, sample_spectrum)
    pgm = cmd_transform(tiny_cfg, tmp_path / 'csv.pgm', spectrum_csv=csv_path, verbose=0)
    assert len(pgm.read_bytes()) == len(b'P5\n16 16\n255\n') + 256


@pytest.fixture
def bench_setup(tmp_path):
    """CWT on 1024-point spectra with an untrained 16x16 model saved to disk."""
    cfg = pipeline_config_from_dict(tiny_config_dict(
        tmp_path, axis={'start_cm1': 400.0, 'end_cm1': 1800.0, 'n_points': 1024},
        transform={'kind': 'cwt', 'image_height': 16, 'image_width': 16},
        bench={'n_spectra': 8, 'warmup': 1}, n_workers=1,
    ))
    checkpoint = tmp_path / 'bench.mdnn'
    save_checkpoint(build_model(cfg.model, seed=cfg.seed), checkpoint)
    return cfg, checkpoint


def test_bench_single_spectrum(bench_setup):
    cfg, checkpoint = bench_setup
    result = cmd_bench(cfg, checkpoint, n_spectra=1, verbose=0)
    assert result.per_spectrum_ms == pytest.approx(1000.0 * result.wall_time_s)


def test_bench_time_scales_with_spectrum_count(bench_setup):
    """Test doubling the spectrum count takes 1.5x to 3x as long (best of three)."""
    cfg, checkpoint = bench_setup
    single = min(cmd_bench(cfg, checkpoint, n_spectra=8, verbose=0).wall_time_s for _ in range(3))
    double = min(cmd_bench(cfg, checkpoint, n_spectra=16, verbose=0).wall_time_s for _ in range(3))
    assert 1.5 <= double / single <= 3.0


# ============================================================================
# CLI
# ============================================================================

def test_error_categories():
    assert categorize(ConfigError('x')) == ('config', EXIT_CONFIG)
    assert categorize(TruncatedTensorError('x')) == ('format', EXIT_DATA)
    assert categorize(DivergenceError('x'))[1] == 4
    assert categorize(RuntimeError('x')) == ('error', EXIT_OTHER)


def test_cli_config_error_exit_code(config_file, capsys):
    path = config_file(augment={'max_shift_frac': 0.3})
    assert main(['gen', '--config', path, '--quiet']) == EXIT_CONFIG
    assert 'augment.max_shift_frac' in capsys.readouterr().err


def test_cli_missing_checkpoint(config_file, capsys):
    assert main(['eval', '--config', config_file(), '--quiet']) == EXIT_DATA
    assert 'Error [' in capsys.readouterr().err


def test_cli_transform_rejects_two_sources(config_file, tmp_path):
    code = main(['transform', '--config', config_file(), '--spectrum', 'x.csv', '--label', '100',
                 '--output', str(tmp_path / 'x.pgm'), '--quiet'])
    assert code == EXIT_OTHER


def test_cli_gen_and_transform(config_file, tmp_path):
    """Test gen and transform through the argument parser."""
    path = config_file()
    out = tmp_path / 'cli'
    assert main(['gen', '--config', path, '--out', str(out), '--transform', 'cwt', '--quiet']) == 0
    saved = json.loads((out / 'config.json').read_text())
    assert saved['transform']['kind'] == 'cwt'

    pgm = tmp_path / 'one.pgm'
    assert main(['transform', '--config', path, '--label', '101', '--output', str(pgm), '--quiet']) == 0
    assert pgm.exists()


@pytest.mark.slow
def test_desk_experiment_beats_baseline(tmp_path):
    """Test the default desk run beats the all-labels-positive classifier on every measure."""
    cfg = pipeline_config_from_dict({'output_dir': str(tmp_path)})
    cmd_gen(cfg, test_set=True, verbose=0)
    cmd_train(cfg, verbose=0)
    report = cmd_eval(cfg, verbose=0)

    test = load_dataset(tmp_path / 'test')
    baseline = evaluate(all_positive_baseline(test.labels_array() > 0.5), list(cfg.substances.order), verbose=0)
    assert metrics_not_beating(report, baseline) == []
    assert set(report.auc) == set(cfg.substances.order)

    saved = pd.read_csv(tmp_path / 'eval' / 'baseline_metrics.csv').set_index('metric')['value']
    assert saved['hamming_loss'] == pytest.approx(baseline.hamming_loss)

