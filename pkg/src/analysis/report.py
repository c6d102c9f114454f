"""Metric reports: full evaluation of an EvalBatch, CSV export and printing."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import pandas as pd

import config
from src.analysis.metrics import (
    BINARY_MEASURES,
    EvalBatch,
    RocCurve,
    average_precision,
    confusion,
    coverage,
    f1_macro,
    f1_micro,
    hamming_loss,
    macro_average,
    micro_average,
    one_error,
    ranking_loss_with_skips,
    roc_auc,
)
from src.data.formats import atomic_write_csv
from src.errors import DegenerateLabelError

SCALAR_METRICS = [
    'hamming_loss',
    'one_error',
    'coverage',
    'ranking_loss',
    'average_precision',
    'f1_macro',
    'f1_micro',
    'precision_macro',
    'precision_micro',
    'recall_macro',
    'recall_micro',
]


@dataclass
class MetricsReport:
    """Every multi-label measure for one evaluation run.

    `roc` and `auc` hold only labels with both positives and negatives;
    the indices of the other labels are listed in `auc_skipped`.
    """
    hamming_loss: float
    one_error: float
    coverage: float
    ranking_loss: float
    average_precision: float
    f1_macro: float
    f1_micro: float
    precision_macro: float
    precision_micro: float
    recall_macro: float
    recall_micro: float
    label_names: List[str]
    n_samples: int
    ranking_loss_skipped: int = 0
    auc_skipped: List[int] = field(default_factory=list)
    roc: Dict[str, RocCurve] = field(default_factory=dict)
    auc: Dict[str, float] = field(default_factory=dict)

    def scalar_metrics(self) -> Dict[str, float]:
        return {name: getattr(self, name) for name in SCALAR_METRICS}

    def to_frame(self) -> pd.DataFrame:
        """Flat (metric, value) table: scalar metrics, then one auc_<label> row per label."""
        rows = [(name, value) for name, value in self.scalar_metrics().items()]
        rows.extend((f"auc_{name}", value) for name, value in self.auc.items())
        rows.append(('n_samples', self.n_samples))
        rows.append(('ranking_loss_skipped', self.ranking_loss_skipped))
        rows.append(('auc_skipped', len(self.auc_skipped)))
        return pd.DataFrame(rows, columns=['metric', 'value'])


def evaluate(
    batch: EvalBatch,
    label_names: Optional[Sequence[str]] = None,
    verbose: int = config.VERBOSITY
) -> MetricsReport:
    """Compute every metric and the ROC curve of each non-degenerate label.

    Args:
        batch: Scores, predictions and truths
        label_names: One name per label column (default: substance order or indices)
        verbose: Verbosity level (2 prints skipped samples and labels)

    Returns:
        MetricsReport
    """
    if label_names is None:
        if batch.n_labels == len(config.SUBSTANCE_ORDER):
            label_names = list(config.SUBSTANCE_ORDER)
        else:
            label_names = [str(j) for j in range(batch.n_labels)]
    label_names = list(label_names)
    if len(label_names) != batch.n_labels:
        raise ValueError(f"Got {len(label_names)} label names for {batch.n_labels} labels")

    conf = confusion(batch)
    rloss, skipped = ranking_loss_with_skips(batch)
    if verbose >= 2 and skipped:
        print(f"  Ranking loss: skipped {skipped} sample(s) with every label relevant")

    report = MetricsReport(
        hamming_loss=hamming_loss(batch),
        one_error=one_error(batch),
        coverage=coverage(batch),
        ranking_loss=rloss,
        average_precision=average_precision(batch),
        f1_macro=f1_macro(conf),
        f1_micro=f1_micro(conf),
        precision_macro=macro_average(conf, BINARY_MEASURES['precision']),
        precision_micro=micro_average(conf, BINARY_MEASURES['precision']),
        recall_macro=macro_average(conf, BINARY_MEASURES['recall']),
        recall_micro=micro_average(conf, BINARY_MEASURES['recall']),
        label_names=label_names,
        n_samples=batch.n_samples,
        ranking_loss_skipped=skipped,
    )

    for j, name in enumerate(label_names):
        try:
            curve, auc = roc_auc(batch, j, name)
        except DegenerateLabelError as e:
            if verbose >= 2:
                print(f"  ROC skipped: {e}")
            report.auc_skipped.append(j)
            continue
        report.roc[name] = curve
        report.auc[name] = auc

    return report


def roc_frame(curve: RocCurve) -> pd.DataFrame:
    return pd.DataFrame({'threshold': curve.thresholds, 'fpr': curve.fpr, 'tpr': curve.tpr})


def write_metrics_report(report: MetricsReport, directory: Union[str, Path]) -> List[Path]:
    """Write metrics.csv and one roc_label_<name>.csv per label.

    Returns:
        Paths written, metrics.csv first
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    metrics_path = directory / 'metrics.csv'
    atomic_write_csv(report.to_frame(), metrics_path, float_format='%.12g')
    written = [metrics_path]

    for name, curve in report.roc.items():
        path = directory / f"roc_label_{name}.csv"
        atomic_write_csv(roc_frame(curve), path, float_format='%.12g')
        written.append(path)
    return written


def print_metrics_report(report: MetricsReport, baseline: Optional[MetricsReport] = None):
    """Pretty print a report, optionally next to a baseline report."""
    print("=" * 64)
    print("MULTI-LABEL EVALUATION")
    print("=" * 64)
    print(f"  Samples: {report.n_samples}   Labels: {', '.join(report.label_names)}")
    print()

    header = f"  {'Metric':<22}{'Model':>12}"
    if baseline is not None:
        header += f"{'Baseline':>12}"
    print(header)
    print("-" * 64)
    for name, value in report.scalar_metrics().items():
        line = f"  {name:<22}{value:12.4f}"
        if baseline is not None:
            line += f"{getattr(baseline, name):12.4f}"
        print(line)

    if report.auc:
        print("-" * 64)
        for name, value in report.auc.items():
            line = f"  {'AUC ' + name:<22}{value:12.4f}"
            if baseline is not None and name in baseline.auc:
                line += f"{baseline.auc[name]:12.4f}"
            print(line)
    if report.ranking_loss_skipped:
        print(f"\n  ({report.ranking_loss_skipped} sample(s) skipped by ranking loss)")
    if report.auc_skipped:
        names = ', '.join(report.label_names[j] for j in report.auc_skipped)
        print(f"  (no AUC for {names}: only one class present)")


BASELINE_METRICS = ['hamming_loss', 'one_error', 'coverage', 'ranking_loss',
                    'average_precision', 'f1_macro', 'f1_micro']
LOWER_IS_BETTER = {'hamming_loss', 'one_error', 'coverage', 'ranking_loss'}


def metrics_not_beating(report: MetricsReport, baseline: MetricsReport) -> List[str]:
    """Names of the measures (and auc_<label> entries) where report is not strictly better.

    Precision and recall are left out: an all-positive baseline always has recall 1.
    """
    failed = []
    for name in BASELINE_METRICS:
        ours, theirs = getattr(report, name), getattr(baseline, name)
        better = ours < theirs if name in LOWER_IS_BETTER else ours > theirs
        if not better:
            failed.append(name)
    for name, value in baseline.auc.items():
        if report.auc.get(name, float('-inf')) <= value:
            failed.append(f"auc_{name}")
    return failed


def missed_targets(
    report: MetricsReport,
    max_hamming_loss: float = config.TARGET_HAMMING_LOSS,
    min_average_precision: float = config.TARGET_AVERAGE_PRECISION
) -> List[str]:
    """Human-readable list of desk-scale targets the report misses."""
    missed = []
    if report.hamming_loss > max_hamming_loss:
        missed.append(f"hamming_loss {report.hamming_loss:.4f} > {max_hamming_loss}")
    if report.average_precision < min_average_precision:
        missed.append(f"average_precision {report.average_precision:.4f} < {min_average_precision}")
    return missed
