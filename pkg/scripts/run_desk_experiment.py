#!/usr/bin/env python3
"""
Desk-scale experiment runner.

Runs gen -> test set -> train -> eval -> bench once per transform and writes
a comparison table, with the all-labels-positive classifier as the baseline
every trained model has to beat. Exits with status 1 when a transform misses
the desk-scale targets (config.TARGET_HAMMING_LOSS, config.TARGET_AVERAGE_PRECISION)
or fails to beat the baseline on any measure.

Usage:
    python scripts/run_desk_experiment.py --out runs/desk
    python scripts/run_desk_experiment.py --transforms cwt --seed 7 --export
"""

import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).parent.parent))

import argparse
import time
from typing import Dict, List, Optional, Sequence

import pandas as pd

import config
from src.analysis.metrics import all_positive_baseline
from src.analysis.report import BASELINE_METRICS, MetricsReport, evaluate, metrics_not_beating, missed_targets
from src.data.dataset import load_dataset
from src.simulation.benchmark import cmd_bench
from src.simulation.commands import TEST_DIR, cmd_eval, cmd_gen, cmd_train
from src.simulation.pipeline_config import PipelineConfig, load_pipeline_config

def run_one_transform(cfg: PipelineConfig, verbose: int = 1) -> Dict:
    """Full pipeline for one transform; returns one comparison row.

    The row also records the desk-scale targets the model misses and the
    measures on which it does not beat the all-labels-positive classifier.
    """
    start = time.time()
    cmd_gen(cfg, test_set=True, verbose=verbose)
    _, train_report = cmd_train(cfg, verbose=verbose)
    report = cmd_eval(cfg, verbose=verbose)
    bench = cmd_bench(cfg, verbose=verbose)

    row = {'transform': cfg.transform.kind}
    row.update({name: getattr(report, name) for name in BASELINE_METRICS})
    row['mean_auc'] = sum(report.auc.values()) / len(report.auc) if report.auc else float('nan')
    row['epochs'] = len(train_report.epochs)
    row['stop_reason'] = train_report.stop_reason
    row['per_spectrum_ms'] = bench.per_spectrum_ms
    row['model_mb'] = bench.model_file_bytes / 1e6
    row['elapsed_s'] = time.time() - start
    row['missed_targets'] = '; '.join(missed_targets(report))
    row['not_beating_baseline'] = ' '.join(metrics_not_beating(report, baseline_report(cfg)))
    return row


def baseline_report(cfg: PipelineConfig) -> MetricsReport:
    """Metrics of predicting every label for every test spectrum."""
    test = load_dataset(cfg.output_path / TEST_DIR)
    return evaluate(all_positive_baseline(test.labels_array() > 0.5), list(cfg.substances.order), verbose=0)


def baseline_row(cfg: PipelineConfig) -> Dict:
    report = baseline_report(cfg)
    row = {'transform': 'all-positive'}
    row.update({name: getattr(report, name) for name in BASELINE_METRICS})
    return row


def run_desk_experiment(
    base: PipelineConfig,
    transforms: Sequence[str] = config.TRANSFORM_KINDS,
    verbose: int = 1
) -> pd.DataFrame:
    """Run the pipeline per transform under <output_dir>/<transform>.

    Args:
        base: Configuration shared by every run
        transforms: Transform kinds to compare
        verbose: Verbosity level

    Returns:
        DataFrame with one row per transform plus the baseline row
    """
    rows: List[Dict] = []
    last: Optional[PipelineConfig] = None
    for i, kind in enumerate(transforms, 1):
        if verbose >= 1:
            print(f"\n{'=' * 70}")
            print(f"[{i}/{len(transforms)}] {kind.upper()}")
            print(f"{'=' * 70}")
        cfg = base.with_overrides(output_dir=str(base.output_path / kind), transform=kind)
        rows.append(run_one_transform(cfg, verbose=verbose))
        last = cfg

    if last is not None:
        rows.append(baseline_row(last))
    return pd.DataFrame(rows)


def target_failures(df: pd.DataFrame) -> List[str]:
    """One line per transform that misses a target or does not beat the baseline."""
    lines = []
    for row in df[df['transform'] != 'all-positive'].itertuples(index=False):
        problems = [row.missed_targets] if row.missed_targets else []
        if row.not_beating_baseline:
            problems.append(f"not beating baseline on {row.not_beating_baseline}")
        if problems:
            lines.append(f"{row.transform}: {'; '.join(problems)}")
    return lines


def print_comparison(df: pd.DataFrame):
    print(f"\n{'=' * 70}")
    print("TRANSFORM COMPARISON")
    print(f"{'=' * 70}\n")
    with pd.option_context('display.float_format', '{:.4f}'.format, 'display.width', 120):
        print(df.to_string(index=False))
    print(f"\nFull-scale reference detection time: {config.REFERENCE_DETECTION_TIME_S} s, "
          f"model size: {config.REFERENCE_MODEL_SIZE_MB} MB")
    print(f"\n{'=' * 70}\n")


def main():
    """Main entry point."""
    parser = argparse.ArgumentParser(description='Run the desk-scale transform comparison')
    parser.add_argument('--config', type=str, help='Experiment JSON file')
    parser.add_argument('--seed', type=int, help='Master seed')
    parser.add_argument('--out', type=str, default='runs/desk', help='Output directory (default: runs/desk)')
    parser.add_argument('--transforms', nargs='+', choices=list(config.TRANSFORM_KINDS),
                        default=list(config.TRANSFORM_KINDS), help='Transforms to compare')
    parser.add_argument('--export', action='store_true', help='Export the comparison to CSV')
    parser.add_argument('--quiet', action='store_true', help='Suppress progress messages')

    args = parser.parse_args()
    verbose = 0 if args.quiet else 1

    try:
        base = load_pipeline_config(args.config).with_overrides(seed=args.seed, output_dir=args.out)
        df = run_desk_experiment(base, args.transforms, verbose=verbose)
    except (ValueError, ArithmeticError, FileNotFoundError) as e:
        print(f"Error: {e}")
        return 1

    print_comparison(df)

    if args.export:
        filename = base.output_path / 'transform_comparison.csv'
        df.to_csv(filename, index=False, float_format='%.6g')
        print(f"Exported comparison to {filename}")

    failures = target_failures(df)
    if failures:
        print("Desk-scale targets missed:")
        for line in failures:
            print(f"  {line}")
        return 1
    print(f"All transforms meet hamming_loss <= {config.TARGET_HAMMING_LOSS} and "
          f"average_precision >= {config.TARGET_AVERAGE_PRECISION} and beat the baseline")
    return 0


if __name__ == '__main__':
    sys.exit(main())
