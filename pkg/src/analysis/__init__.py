"""Evaluation: multi-label metrics, ROC/AUC, reports and figures."""

from .metrics import (
    BINARY_MEASURES,
    ConfusionPerLabel,
    EvalBatch,
    RocCurve,
    all_positive_baseline,
    auc_from_curve,
    average_precision,
    confusion,
    coverage,
    f1_macro,
    f1_micro,
    hamming_loss,
    label_ranks,
    macro_average,
    micro_average,
    one_error,
    ranking_loss,
    ranking_loss_with_skips,
    roc_auc,
    roc_curve,
)
from .report import (
    MetricsReport,
    evaluate,
    metrics_not_beating,
    missed_targets,
    print_metrics_report,
    write_metrics_report,
)

__all__ = [
    'BINARY_MEASURES',
    'ConfusionPerLabel',
    'EvalBatch',
    'MetricsReport',
    'RocCurve',
    'all_positive_baseline',
    'auc_from_curve',
    'average_precision',
    'confusion',
    'coverage',
    'evaluate',
    'f1_macro',
    'f1_micro',
    'hamming_loss',
    'label_ranks',
    'macro_average',
    'micro_average',
    'metrics_not_beating',
    'missed_targets',
    'one_error',
    'print_metrics_report',
    'ranking_loss',
    'ranking_loss_with_skips',
    'roc_auc',
    'roc_curve',
    'write_metrics_report',
]
