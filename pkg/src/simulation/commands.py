"""End-to-end pipeline commands: gen, train, eval, bench, transform.

Output directory layout (PipelineConfig.output_dir):

    config.json           configuration the data was generated with
    raw/<bits>_<k>.csv    raw simulated spectra
    dataset/              balanced training images (manifest.csv + .mdnt files)
    test/                 held-out test images (gen --test-set)
    model.mdnn            trained checkpoint
    train_report.csv      per-epoch losses
    train_summary.json    stop reason, best epoch, parameter count
    eval/metrics.csv      metric,value table; eval/roc_label_<name>.csv per label
    eval/roc.png          ROC curves of every label
"""

import json
from pathlib import Path
from typing import Optional, Tuple, Union

from src.analysis.metrics import EvalBatch, all_positive_baseline
from src.analysis.report import MetricsReport, evaluate, print_metrics_report, write_metrics_report
from src.analysis.visualization import plot_roc_curves
from src.data.augmentation import oversample_to
from src.data.dataset import DatasetItem, LabeledDataset, load_dataset, save_dataset, shuffle_split
from src.data.formats import read_spectrum_csv, write_pgm, write_spectrum_csv
from src.data.simulator import generate_raw_set, generate_spectra_at_snr, synth_raw_spectrum
from src.errors import DatasetError, ShapeMismatchError
from src.models.label import MixtureLabel
from src.network.checkpoint import load_checkpoint, save_checkpoint
from src.network.inference import predict_scores, threshold_scores
from src.network.model import build_model, count_parameters
from src.network.training import TrainReport, fit, print_train_report
from src.simulation.pipeline_config import PipelineConfig, save_pipeline_config
from src.transforms import spectrum_to_image
from src.utils.parallel import ordered_map
from src.utils.seeding import derive_rng

PathLike = Union[str, Path]

DATASET_DIR = 'dataset'
TEST_DIR = 'test'
RAW_DIR = 'raw'
CHECKPOINT_NAME = 'model.mdnn'
EVAL_DIR = 'eval'


def config_classes(cfg: PipelineConfig):
    return [MixtureLabel.from_string(bits) for bits in cfg.substances.raw_counts]


def cmd_gen(cfg: PipelineConfig, test_set: bool = False, verbose: int = 1) -> Path:
    """Simulate raw spectra, balance and transform them, and write the dataset.

    Args:
        cfg: Experiment configuration
        test_set: Also write the held-out test set
        verbose: Verbosity level (0=silent, 1=progress, 2=debug)

    Returns:
        Path to the dataset directory
    """
    # Validate everything that can fail before touching the filesystem
    library = cfg.load_library()
    axis = cfg.axis.to_axis()
    settings = cfg.acquisition_settings()

    out = cfg.output_path
    if verbose >= 1:
        print(f"\n{'#' * 70}")
        print(f"GENERATE: {sum(cfg.substances.raw_counts.values())} raw spectra -> "
              f"{cfg.target_per_class}/class, transform={cfg.transform.kind}")
        print(f"Output: {out}   Seed: {cfg.seed}")
        print(f"{'#' * 70}\n")

    out.mkdir(parents=True, exist_ok=True)
    save_pipeline_config(cfg, out / 'config.json')

    raw = generate_raw_set(library, cfg.substances.raw_counts, axis, cfg.seed, settings,
                           cfg.n_workers, verbose)
    raw_dir = out / RAW_DIR
    raw_dir.mkdir(exist_ok=True)
    for stale in raw_dir.glob('*.csv'):
        stale.unlink()
    counters = {}
    for spectrum in raw:
        bits = spectrum.label.to_string()
        index = counters.get(bits, 0)
        counters[bits] = index + 1
        write_spectrum_csv(raw_dir / f"{bits}_{index:03d}.csv", spectrum)

    dataset = oversample_to(raw, cfg.target_per_class, cfg.augment, cfg.transform,
                            classes=config_classes(cfg), n_workers=cfg.n_workers, verbose=verbose)
    dataset_dir = out / DATASET_DIR
    save_dataset(dataset, dataset_dir)

    if verbose >= 1:
        print(f"  Wrote {len(dataset)} images to {dataset_dir}")
        for bits, count in dataset.class_counts.items():
            print(f"    {bits} {MixtureLabel.from_string(bits).display_name(cfg.substances.order):<45} {count}")

    if test_set:
        cmd_gen_test(cfg, verbose=verbose)

    return dataset_dir


def cmd_gen_test(cfg: PipelineConfig, verbose: int = 1) -> Path:
    """Fresh, unaugmented test images at the test SNR range (classes round-robin)."""
    library = cfg.load_library()
    axis = cfg.axis.to_axis()

    if verbose >= 1:
        lo, hi = cfg.eval.test_snr_range_db
        print(f"Generating {cfg.eval.test_set_size} test spectra at {lo:.0f}-{hi:.0f} dB...")

    spectra = generate_spectra_at_snr(
        library, cfg.eval.test_set_size, axis, cfg.eval.test_snr_range_db, cfg.seed,
        stream='test', settings=cfg.acquisition_settings(), classes=config_classes(cfg),
        n_workers=cfg.n_workers
    )

    def build(job):
        index, spectrum = job
        image = spectrum_to_image(spectrum, cfg.transform)
        return DatasetItem(image, spectrum.label, f"test:{spectrum.label.to_string()}:{index}")

    items = ordered_map(build, list(enumerate(spectra)), cfg.n_workers, verbose)
    test_dir = cfg.output_path / TEST_DIR
    save_dataset(LabeledDataset(items), test_dir)

    if verbose >= 1:
        print(f"  Wrote {len(items)} test images to {test_dir}")
    return test_dir


def cmd_train(
    cfg: PipelineConfig,
    dataset_dir: Optional[PathLike] = None,
    verbose: int = 1
) -> Tuple[Path, TrainReport]:
    """Split the dataset 8:2, train the MDNN and save checkpoint and report.

    Returns:
        Tuple of (checkpoint path, TrainReport)
    """
    dataset_dir = Path(dataset_dir) if dataset_dir else cfg.output_path / DATASET_DIR
    dataset = load_dataset(dataset_dir)
    if len(dataset) == 0:
        raise DatasetError(f"Dataset in {dataset_dir} is empty")
    if tuple(dataset.image_shape) != tuple(cfg.model.input_hw):
        raise ShapeMismatchError(
            f"Dataset images are {dataset.image_shape}, model.input_hw is {tuple(cfg.model.input_hw)}"
        )

    train, val = shuffle_split(dataset, cfg.train_fraction, cfg.seed)
    model = build_model(cfg.model, seed=cfg.seed)

    if verbose >= 1:
        print(f"\n{'#' * 70}")
        print(f"TRAIN: {len(train)} train / {len(val)} val images, {count_parameters(model):,} parameters")
        print(f"{'#' * 70}\n")
        if verbose >= 2:
            print(model.summary())

    report = fit(model, train, val, cfg.train, verbose=verbose)

    out = cfg.output_path
    out.mkdir(parents=True, exist_ok=True)
    checkpoint = out / CHECKPOINT_NAME
    n_bytes = save_checkpoint(model, checkpoint)

    report.to_frame().to_csv(out / 'train_report.csv', index=False, float_format='%.12g')
    summary = report.summary()
    summary.update({
        'n_train': len(train),
        'n_val': len(val),
        'n_parameters': count_parameters(model),
        'checkpoint_bytes': n_bytes,
    })
    with open(out / 'train_summary.json', 'w') as f:
        json.dump(summary, f, indent=2)

    if verbose >= 1:
        print_train_report(report)
    return checkpoint, report


def score_dataset(model, dataset: LabeledDataset, threshold: float) -> EvalBatch:
    if len(dataset) == 0:
        raise DatasetError("Cannot evaluate an empty test set")
    if tuple(dataset.image_shape) != tuple(model.config.input_hw):
        raise ShapeMismatchError(
            f"Test images are {dataset.image_shape}, checkpoint expects {tuple(model.config.input_hw)}"
        )
    scores = predict_scores(model, dataset.images_array())
    return EvalBatch(scores, threshold_scores(scores, threshold), dataset.labels_array() > 0.5)


def cmd_eval(
    cfg: PipelineConfig,
    checkpoint: Optional[PathLike] = None,
    test_dir: Optional[PathLike] = None,
    threshold: Optional[float] = None,
    verbose: int = 1
) -> MetricsReport:
    """Score a test set with a checkpoint and write the metric CSVs.

    Also writes baseline_metrics.csv for the all-labels-positive classifier
    and roc.png with every label's ROC curve.
    """
    checkpoint = Path(checkpoint) if checkpoint else cfg.output_path / CHECKPOINT_NAME
    test_dir = Path(test_dir) if test_dir else cfg.output_path / TEST_DIR
    threshold = cfg.eval.threshold if threshold is None else threshold

    model = load_checkpoint(checkpoint)
    dataset = load_dataset(test_dir)
    batch = score_dataset(model, dataset, threshold)

    label_names = list(cfg.substances.order)
    report = evaluate(batch, label_names, verbose=verbose)
    baseline = evaluate(all_positive_baseline(batch.truths), label_names, verbose=0)

    eval_dir = cfg.output_path / EVAL_DIR
    write_metrics_report(report, eval_dir)
    baseline.to_frame().to_csv(eval_dir / 'baseline_metrics.csv', index=False, float_format='%.12g')
    plot_roc_curves(report, eval_dir / 'roc.png')

    if verbose >= 1:
        print(f"\nEvaluated {checkpoint.name} on {len(dataset)} test images (threshold {threshold})\n")
        print_metrics_report(report, baseline)
    return report


def cmd_transform(
    cfg: PipelineConfig,
    output: PathLike,
    spectrum_csv: Optional[PathLike] = None,
    label_bits: Optional[str] = None,
    verbose: int = 1
) -> Path:
    """Write one spectrum's scale image as a PGM.

    The spectrum comes from a CSV file, or is simulated for a class when
    label_bits is given (first class of the configuration otherwise).
    """
    if spectrum_csv is not None:
        spectrum = read_spectrum_csv(spectrum_csv)
    else:
        library = cfg.load_library()
        bits = label_bits or next(iter(cfg.substances.raw_counts))
        label = MixtureLabel.from_string(bits)
        if label.n_labels != len(cfg.substances.order) or label.is_empty:
            raise DatasetError(f"Label '{bits}' is not a class of this configuration")
        rng = derive_rng(cfg.seed, 'transform', bits)
        spectrum = synth_raw_spectrum(library, label, cfg.axis.to_axis(), rng, cfg.acquisition_settings())

    image = spectrum_to_image(spectrum, cfg.transform)
    output = Path(output)
    output.parent.mkdir(parents=True, exist_ok=True)
    write_pgm(output, image.pixels)

    if verbose >= 1:
        h, w = image.shape
        print(f"Wrote {cfg.transform.kind} scale image ({h}x{w}) of {spectrum.label} to {output}")
    return output
