# ============================================================================
# main.py
# ============================================================================
"""Command-line entry point for Raman mixture identification.

Usage:
    python main.py gen [--test-set] [--config exp.json] [--seed 7] [--out runs/a]
    python main.py train [--dataset runs/a/dataset]
    python main.py eval [--checkpoint runs/a/model.mdnn] [--test-dir runs/a/test]
    python main.py bench [--n-spectra 100]
    python main.py transform [--spectrum s.csv | --label 011] --output img.pgm
"""

import argparse
import json
import sys

from src.errors import (
    CheckpointError,
    ConfigError,
    DatasetError,
    DegenerateLabelError,
    DivergenceError,
    InvalidRangeError,
    ProfileError,
    ShapeMismatchError,
    SignalLengthError,
    TensorFormatError,
    ZeroSignalError,
)
from src.simulation.benchmark import cmd_bench
from src.simulation.commands import cmd_eval, cmd_gen, cmd_train, cmd_transform
from src.simulation.pipeline_config import load_pipeline_config

EXIT_OTHER = 1
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4

# Checked in order; subclasses before their parents
ERROR_CATEGORIES = (
    (ConfigError, 'config', EXIT_CONFIG),
    (InvalidRangeError, 'config', EXIT_CONFIG),
    (TensorFormatError, 'format', EXIT_DATA),
    (CheckpointError, 'checkpoint', EXIT_DATA),
    (DatasetError, 'dataset', EXIT_DATA),
    (ShapeMismatchError, 'shape', EXIT_DATA),
    (ProfileError, 'profile', EXIT_DATA),
    (SignalLengthError, 'signal', EXIT_DATA),
    (FileNotFoundError, 'io', EXIT_DATA),
    (DegenerateLabelError, 'metrics', EXIT_NUMERICAL),
    (DivergenceError, 'numerical', EXIT_NUMERICAL),
    (ZeroSignalError, 'numerical', EXIT_NUMERICAL),
)


def categorize(error: Exception):
    """Map an exception to (category, exit code)."""
    for error_type, category, code in ERROR_CATEGORIES:
        if isinstance(error, error_type):
            return category, code
    return 'error', EXIT_OTHER


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=str, help='Experiment JSON file (default: config.py values)')
    common.add_argument('--seed', type=int, help='Master seed')
    common.add_argument('--out', type=str, help='Output directory')
    common.add_argument('--transform', choices=['stft', 'wvd', 'cwt'], help='Time-frequency transform')
    common.add_argument('--threshold', type=float, help='Decision threshold for eval')
    common.add_argument('--workers', type=int, help='Worker threads')
    common.add_argument('--quiet', action='store_true', help='Suppress progress messages')
    common.add_argument('--verbose', action='store_true', help='Print debug detail')

    parser = argparse.ArgumentParser(description='Raman mixture identification with a multi-label CNN')
    sub = parser.add_subparsers(dest='command', required=True)

    gen = sub.add_parser('gen', parents=[common], help='Simulate, augment and write the training set')
    gen.add_argument('--test-set', action='store_true', help='Also write the held-out test set')

    train = sub.add_parser('train', parents=[common], help='Train the MDNN and save a checkpoint')
    train.add_argument('--dataset', type=str, help='Dataset directory (default: <out>/dataset)')

    ev = sub.add_parser('eval', parents=[common], help='Score the test set and write metric CSVs')
    ev.add_argument('--checkpoint', type=str, help='Checkpoint (default: <out>/model.mdnn)')
    ev.add_argument('--test-dir', type=str, help='Test set directory (default: <out>/test)')

    bench = sub.add_parser('bench', parents=[common], help='Time transform + inference per spectrum')
    bench.add_argument('--checkpoint', type=str, help='Checkpoint (default: <out>/model.mdnn)')
    bench.add_argument('--n-spectra', type=int, help='Spectra to time (default: from config)')

    tf = sub.add_parser('transform', parents=[common], help='Write one spectrum as a PGM scale image')
    tf.add_argument('--spectrum', type=str, help='Spectrum CSV (wavenumber,intensity,label_bits)')
    tf.add_argument('--label', type=str, help='Class bits to simulate instead, e.g. 101')
    tf.add_argument('--output', type=str, required=True, help='PGM output path')

    return parser


def run(args: argparse.Namespace) -> int:
    verbose = 0 if args.quiet else (2 if args.verbose else 1)

    cfg = load_pipeline_config(args.config).with_overrides(
        seed=args.seed,
        output_dir=args.out,
        transform=args.transform,
        threshold=args.threshold,
        n_workers=args.workers,
    )

    if args.command == 'gen':
        cmd_gen(cfg, test_set=args.test_set, verbose=verbose)
    elif args.command == 'train':
        cmd_train(cfg, dataset_dir=args.dataset, verbose=verbose)
    elif args.command == 'eval':
        cmd_eval(cfg, checkpoint=args.checkpoint, test_dir=args.test_dir, verbose=verbose)
    elif args.command == 'bench':
        result = cmd_bench(cfg, checkpoint=args.checkpoint, n_spectra=args.n_spectra, verbose=verbose)
        cfg.output_path.mkdir(parents=True, exist_ok=True)
        with open(cfg.output_path / 'bench.json', 'w') as f:
            json.dump(result.to_dict(), f, indent=2)
    elif args.command == 'transform':
        if args.spectrum and args.label:
            print("Error [usage]: Cannot specify both --spectrum and --label")
            return EXIT_OTHER
        cmd_transform(cfg, args.output, spectrum_csv=args.spectrum, label_bits=args.label, verbose=verbose)

    return 0


def main(argv=None) -> int:
    """Main entry point."""
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except Exception as e:
        category, code = categorize(e)
        print(f"Error [{category}]: {e}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
