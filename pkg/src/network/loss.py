"""Per-label binary cross-entropy."""

from typing import Tuple

import numpy as np
from scipy.special import xlogy

import config
from src.errors import ShapeMismatchError


def bce_loss(
    probs: np.ndarray,
    targets: np.ndarray,
    epsilon: float = config.BCE_EPSILON
) -> Tuple[float, np.ndarray]:
    """Mean binary cross-entropy over all N * L entries.

    Args:
        probs: (N, L) sigmoid outputs
        targets: (N, L) multi-hot targets
        epsilon: Probabilities are clamped to [epsilon, 1 - epsilon] for the loss value

    Returns:
        Tuple of (loss, gradient w.r.t. the pre-sigmoid logits = (p - y) / (N * L))
    """
    probs = np.asarray(probs, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if probs.shape != targets.shape:
        raise ShapeMismatchError(f"probs {probs.shape} and targets {targets.shape} differ in shape")
    if probs.size == 0:
        raise ShapeMismatchError("Loss of an empty batch is undefined")

    clamped = np.clip(probs, epsilon, 1.0 - epsilon)
    loss = -np.mean(xlogy(targets, clamped) + xlogy(1.0 - targets, 1.0 - clamped))
    grad_logits = (probs - targets) / probs.size
    return float(loss), grad_logits
