"""Multi-label evaluation measures and per-label ROC/AUC.

Notation: N samples, q labels, scores f(x_i, y_j), thresholded predictions
h(x_i) and true label sets Y_i. Ranks are 1-based (rank 1 = highest score)
and ties rank the lower label index first.
"""

from dataclasses import dataclass
from typing import Callable, Dict, Tuple

import numpy as np
from scipy.integrate import trapezoid

import config
from src.errors import DegenerateLabelError, ShapeMismatchError


@dataclass
class EvalBatch:
    """Scores, thresholded predictions and truths for N samples and q labels."""
    scores: np.ndarray
    predictions: np.ndarray
    truths: np.ndarray

    def __post_init__(self):
        self.scores = np.asarray(self.scores, dtype=float)
        self.predictions = np.asarray(self.predictions, dtype=bool)
        self.truths = np.asarray(self.truths, dtype=bool)

        if self.scores.ndim != 2 or self.scores.shape[0] == 0 or self.scores.shape[1] == 0:
            raise ShapeMismatchError(f"Scores must be a non-empty N x q matrix, got shape {self.scores.shape}")
        if self.predictions.shape != self.scores.shape or self.truths.shape != self.scores.shape:
            raise ShapeMismatchError(
                f"Shapes differ: scores {self.scores.shape}, predictions {self.predictions.shape}, "
                f"truths {self.truths.shape}"
            )
        if not np.all(np.isfinite(self.scores)):
            raise ValueError("Scores contain non-finite values")
        empty = np.flatnonzero(~self.truths.any(axis=1))
        if len(empty):
            raise ValueError(f"Every sample needs at least one true label; rows {empty.tolist()} have none")

    @classmethod
    def from_scores(cls, scores: np.ndarray, truths: np.ndarray,
                    threshold: float = config.DEFAULT_THRESHOLD) -> 'EvalBatch':
        scores = np.asarray(scores, dtype=float)
        return cls(scores, scores >= threshold, truths)

    @property
    def n_samples(self) -> int:
        return self.scores.shape[0]

    @property
    def n_labels(self) -> int:
        return self.scores.shape[1]


@dataclass
class ConfusionPerLabel:
    """Per-label confusion counts (arrays of length q)."""
    tp: np.ndarray
    fp: np.ndarray
    tn: np.ndarray
    fn: np.ndarray

    @property
    def n_samples(self) -> int:
        return int(self.tp[0] + self.fp[0] + self.tn[0] + self.fn[0])


def confusion(batch: EvalBatch) -> ConfusionPerLabel:
    truth, pred = batch.truths, batch.predictions
    return ConfusionPerLabel(
        tp=np.sum(truth & pred, axis=0),
        fp=np.sum(~truth & pred, axis=0),
        tn=np.sum(~truth & ~pred, axis=0),
        fn=np.sum(truth & ~pred, axis=0),
    )


# ============================================================================
# Binary measures and their macro/micro averages
# ============================================================================

BinaryMeasure = Callable[[np.ndarray, np.ndarray, np.ndarray, np.ndarray], np.ndarray]


def _safe_ratio(numerator, denominator) -> np.ndarray:
    numerator = np.asarray(numerator, dtype=float)
    denominator = np.asarray(denominator, dtype=float)
    out = np.zeros(np.broadcast(numerator, denominator).shape)
    np.divide(numerator, denominator, out=out, where=denominator > 0)
    return out


def precision_measure(tp, fp, tn, fn):
    return _safe_ratio(tp, tp + fp)


def recall_measure(tp, fp, tn, fn):
    return _safe_ratio(tp, tp + fn)


def f1_measure(tp, fp, tn, fn):
    return _safe_ratio(2 * tp, 2 * tp + fp + fn)


def accuracy_measure(tp, fp, tn, fn):
    return _safe_ratio(tp + tn, tp + fp + tn + fn)


BINARY_MEASURES: Dict[str, BinaryMeasure] = {
    'precision': precision_measure,
    'recall': recall_measure,
    'f1': f1_measure,
    'accuracy': accuracy_measure,
}


def macro_average(conf: ConfusionPerLabel, measure: BinaryMeasure) -> float:
    """Mean over labels of the measure evaluated per label."""
    return float(np.mean(measure(conf.tp, conf.fp, conf.tn, conf.fn)))


def micro_average(conf: ConfusionPerLabel, measure: BinaryMeasure) -> float:
    """Measure evaluated on counts summed over labels."""
    return float(measure(conf.tp.sum(), conf.fp.sum(), conf.tn.sum(), conf.fn.sum()))


def f1_macro(conf: ConfusionPerLabel) -> float:
    return macro_average(conf, f1_measure)


def f1_micro(conf: ConfusionPerLabel) -> float:
    return micro_average(conf, f1_measure)


# ============================================================================
# Example-based and ranking-based measures
# ============================================================================

def label_ranks(scores: np.ndarray) -> np.ndarray:
    """1-based rank of every label per sample; equal scores rank the lower index first."""
    scores = np.asarray(scores, dtype=float)
    order = np.argsort(-scores, axis=1, kind='stable')
    ranks = np.empty_like(order)
    rows = np.arange(scores.shape[0])[:, None]
    ranks[rows, order] = np.arange(1, scores.shape[1] + 1)[None, :]
    return ranks


def hamming_loss(batch: EvalBatch) -> float:
    """Mean fraction of labels in the symmetric difference of h(x_i) and Y_i."""
    return float(np.mean(batch.predictions != batch.truths))


def one_error(batch: EvalBatch) -> float:
    """Fraction of samples whose top-scored label is not relevant."""
    top = np.argmax(batch.scores, axis=1)
    return float(np.mean(~batch.truths[np.arange(batch.n_samples), top]))


def coverage(batch: EvalBatch) -> float:
    """Mean depth of the lowest-ranked relevant label, minus one."""
    ranks = label_ranks(batch.scores)
    deepest = np.where(batch.truths, ranks, 0).max(axis=1)
    return float(np.mean(deepest - 1))


def ranking_loss_with_skips(batch: EvalBatch) -> Tuple[float, int]:
    """Ranking loss plus the number of samples skipped.

    A (relevant, irrelevant) pair is mis-ordered when the relevant label's
    score is <= the irrelevant one's. Samples whose labels are all relevant
    have no pairs and are skipped.

    Returns:
        Tuple of (mean mis-ordered pair fraction over scored samples, skipped count)
    """
    truth = batch.truths
    n_relevant = truth.sum(axis=1)
    n_irrelevant = batch.n_labels - n_relevant
    scored = (n_relevant > 0) & (n_irrelevant > 0)
    skipped = int(np.sum(~scored))
    if not scored.any():
        return 0.0, skipped

    scores = batch.scores
    misordered = ((scores[:, :, None] <= scores[:, None, :])
                  & truth[:, :, None] & ~truth[:, None, :]).sum(axis=(1, 2))
    fractions = misordered[scored] / (n_relevant[scored] * n_irrelevant[scored])
    return float(np.mean(fractions)), skipped


def ranking_loss(batch: EvalBatch) -> float:
    return ranking_loss_with_skips(batch)[0]


def average_precision(batch: EvalBatch) -> float:
    """Mean over samples and relevant labels of precision at that label's rank."""
    ranks = label_ranks(batch.scores)
    truth = batch.truths
    # at_or_above[i, y, y'] = y' relevant and ranked at or above y
    at_or_above = (ranks[:, None, :] <= ranks[:, :, None]) & truth[:, None, :]
    precision_at = at_or_above.sum(axis=2) / ranks
    per_sample = np.where(truth, precision_at, 0.0).sum(axis=1) / truth.sum(axis=1)
    return float(np.mean(per_sample))


# ============================================================================
# ROC / AUC
# ============================================================================

@dataclass
class RocCurve:
    """ROC points for one label; the first point is (0, 0) at threshold +inf."""
    thresholds: np.ndarray
    fpr: np.ndarray
    tpr: np.ndarray


def roc_curve(scores: np.ndarray, truth: np.ndarray, label_name: str = '') -> RocCurve:
    """Sweep a threshold over every distinct score, highest first.

    Args:
        scores: Scores for one label, length N
        truth: Booleans for one label, length N
        label_name: Used in the error message

    Returns:
        RocCurve with len(distinct scores) + 1 points
    """
    scores = np.asarray(scores, dtype=float)
    truth = np.asarray(truth, dtype=bool)
    n_pos = int(truth.sum())
    n_neg = len(truth) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DegenerateLabelError(
            f"Label {label_name or '?'} has {n_pos} positives and {n_neg} negatives; ROC needs both"
        )

    thresholds = np.unique(scores)[::-1]
    above = scores[None, :] >= thresholds[:, None]
    tp = (above & truth[None, :]).sum(axis=1)
    fp = (above & ~truth[None, :]).sum(axis=1)

    return RocCurve(
        thresholds=np.concatenate([[np.inf], thresholds]),
        fpr=np.concatenate([[0.0], fp / n_neg]),
        tpr=np.concatenate([[0.0], tp / n_pos]),
    )


def auc_from_curve(curve: RocCurve) -> float:
    """Trapezoidal area under an ROC curve."""
    return float(trapezoid(curve.tpr, curve.fpr))


def roc_auc(batch: EvalBatch, label: int, label_name: str = '') -> Tuple[RocCurve, float]:
    """ROC curve and AUC for one label column."""
    if not 0 <= label < batch.n_labels:
        raise ValueError(f"Label index {label} out of range for {batch.n_labels} labels")
    curve = roc_curve(batch.scores[:, label], batch.truths[:, label], label_name or str(label))
    return curve, auc_from_curve(curve)


def all_positive_baseline(truths: np.ndarray) -> EvalBatch:
    """Trivial classifier that predicts every label for every sample with equal scores."""
    truths = np.asarray(truths, dtype=bool)
    return EvalBatch(np.ones(truths.shape), np.ones(truths.shape, dtype=bool), truths)
