#!/usr/bin/env python3
"""
Render one simulated spectrum under all three transforms.

Writes a PNG with the spectrum and its STFT, WVD and CWT maps side by side,
which is the quickest way to see why the CWT images separate the classes.

Usage:
    python scripts/compare_transforms.py --label 101 --output compare.png
    python scripts/compare_transforms.py --spectrum runs/a/raw/100_000.csv
"""

import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).parent.parent))

import argparse

from src.analysis.visualization import plot_transform_comparison
from src.data.formats import read_spectrum_csv
from src.data.simulator import synth_raw_spectrum
from src.models.label import MixtureLabel
from src.simulation.pipeline_config import load_pipeline_config
from src.utils.seeding import derive_rng


def main():
    """Main entry point."""
    parser = argparse.ArgumentParser(description='Compare STFT, WVD and CWT maps of one spectrum')
    parser.add_argument('--config', type=str, help='Experiment JSON file')
    parser.add_argument('--spectrum', type=str, help='Spectrum CSV to transform')
    parser.add_argument('--label', type=str, default='100', help='Class bits to simulate (default: 100)')
    parser.add_argument('--seed', type=int, help='Master seed')
    parser.add_argument('--output', type=str, default='transform_comparison.png', help='PNG output path')

    args = parser.parse_args()

    try:
        cfg = load_pipeline_config(args.config).with_overrides(seed=args.seed)
        if args.spectrum:
            spectrum = read_spectrum_csv(args.spectrum)
        else:
            label = MixtureLabel.from_string(args.label)
            rng = derive_rng(cfg.seed, 'transform', args.label)
            spectrum = synth_raw_spectrum(cfg.load_library(), label, cfg.axis.to_axis(), rng,
                                          cfg.acquisition_settings())
        plot_transform_comparison(spectrum, args.output, cfg.transform)
    except (ValueError, FileNotFoundError) as e:
        print(f"Error: {e}")
        return 1

    print(f"Saved {args.output}")
    return 0


if __name__ == '__main__':
    sys.exit(main())
