"""Mini-batch SGD training with validation-loss early stopping."""

from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

import config
from src.data.dataset import LabeledDataset
from src.errors import DivergenceError, InvalidRangeError, ShapeMismatchError
from src.network.inference import predict_scores, threshold_scores
from src.network.loss import bce_loss
from src.network.model import MDNN, as_batch
from src.utils.seeding import derive_rng

STOP_EARLY = 'early_stop'
STOP_MAX_EPOCHS = 'max_epochs'


@dataclass
class TrainConfig:
    """Optimizer and stopping settings.

    Attributes:
        learning_rate: SGD step size (> 0)
        batch_size: Samples per step
        max_epochs: Epoch limit (0 leaves the model untrained)
        patience_epochs: Consecutive flat epochs before stopping (>= 1)
        loss_tolerance: Largest |change in val loss| counted as flat
        momentum: Classical momentum coefficient in [0, 1)
        seed: Seed for per-epoch shuffling
    """
    learning_rate: float = config.LEARNING_RATE
    batch_size: int = config.BATCH_SIZE
    max_epochs: int = config.MAX_EPOCHS
    patience_epochs: int = config.PATIENCE_EPOCHS
    loss_tolerance: float = config.LOSS_TOLERANCE
    momentum: float = config.MOMENTUM
    seed: int = config.RANDOM_SEED

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise InvalidRangeError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.batch_size < 1:
            raise InvalidRangeError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.max_epochs < 0:
            raise InvalidRangeError(f"max_epochs must be >= 0, got {self.max_epochs}")
        if self.patience_epochs < 1:
            raise InvalidRangeError(f"patience_epochs must be >= 1, got {self.patience_epochs}")
        if self.loss_tolerance < 0:
            raise InvalidRangeError(f"loss_tolerance must be >= 0, got {self.loss_tolerance}")
        if not 0.0 <= self.momentum < 1.0:
            raise InvalidRangeError(f"momentum must lie in [0, 1), got {self.momentum}")

    def to_dict(self) -> Dict:
        return asdict(self)


class SGD:
    """SGD with classical momentum: v <- mu * v - lr * g; w <- w + v."""

    def __init__(self, momentum: float = config.MOMENTUM):
        self.momentum = momentum
        self.velocity: Dict[Tuple[int, str], np.ndarray] = {}

    def step(self, model: MDNN, learning_rate: float):
        for (index, name, grad) in model.gradients():
            params = model.layers[index].params
            key = (index, name)
            if self.momentum > 0:
                v = self.momentum * self.velocity.get(key, 0.0) - learning_rate * grad
                self.velocity[key] = v
                params[name] = params[name] + v
            else:
                params[name] = params[name] - learning_rate * grad


def train_step(
    model: MDNN,
    batch: np.ndarray,
    targets: np.ndarray,
    learning_rate: float,
    optimizer: Optional[SGD] = None
) -> float:
    """One forward/backward pass and parameter update.

    Args:
        model: Network, updated in place
        batch: (N, H, W) or (N, 1, H, W) images, N >= 1
        targets: (N, n_labels) multi-hot targets
        learning_rate: Step size (0 leaves the weights unchanged)
        optimizer: Stateful optimizer (plain SGD if None)

    Returns:
        Loss before the update
    """
    batch = as_batch(model, batch)
    if len(batch) == 0:
        raise ShapeMismatchError("train_step needs a non-empty batch")

    probs = model.forward(batch)
    loss, grad_logits = bce_loss(probs, targets)
    if not np.isfinite(loss):
        raise DivergenceError(f"Training loss became non-finite ({loss})")

    model.backward_from_logits(grad_logits)
    (optimizer or SGD(momentum=0.0)).step(model, learning_rate)
    return loss


@dataclass
class EpochRecord:
    epoch: int
    train_loss: float
    val_loss: float
    val_hamming: float


@dataclass
class TrainReport:
    """Per-epoch history and why training stopped."""
    epochs: List[EpochRecord] = field(default_factory=list)
    stop_reason: str = STOP_MAX_EPOCHS
    best_epoch: int = 0
    best_val_loss: float = float('inf')

    @property
    def n_epochs(self) -> int:
        return len(self.epochs)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([asdict(record) for record in self.epochs],
                            columns=['epoch', 'train_loss', 'val_loss', 'val_hamming'])

    def summary(self) -> Dict:
        last = self.epochs[-1] if self.epochs else None
        return {
            'n_epochs': self.n_epochs,
            'stop_reason': self.stop_reason,
            'best_epoch': self.best_epoch,
            'best_val_loss': self.best_val_loss if self.epochs else None,
            'final_train_loss': last.train_loss if last else None,
            'final_val_loss': last.val_loss if last else None,
            'final_val_hamming': last.val_hamming if last else None,
        }


def evaluate_loss(
    model: MDNN,
    images: np.ndarray,
    targets: np.ndarray,
    batch_size: int = config.BATCH_SIZE,
    threshold: float = config.DEFAULT_THRESHOLD
) -> Tuple[float, float]:
    """(mean BCE, Hamming loss) of the model on a labelled batch."""
    scores = predict_scores(model, images, batch_size)
    loss, _ = bce_loss(scores, targets)
    hamming = float(np.mean(threshold_scores(scores, threshold) != (targets > 0.5)))
    return loss, hamming


def _check_dataset(model: MDNN, dataset: LabeledDataset, name: str):
    if len(dataset) == 0:
        return
    if tuple(dataset.image_shape) != tuple(model.config.input_hw):
        raise ShapeMismatchError(
            f"{name} images are {dataset.image_shape}, model expects {tuple(model.config.input_hw)}"
        )
    if dataset.n_labels != model.config.n_labels:
        raise ShapeMismatchError(
            f"{name} labels have {dataset.n_labels} bits, model outputs {model.config.n_labels}"
        )


def fit(
    model: MDNN,
    train: LabeledDataset,
    val: LabeledDataset,
    tcfg: TrainConfig = TrainConfig(),
    verbose: int = config.VERBOSITY
) -> TrainReport:
    """Train until validation loss stops changing or max_epochs is reached.

    The training order is reshuffled every epoch from (seed, epoch). Training
    stops once |val_loss[e] - val_loss[e-1]| <= loss_tolerance for
    patience_epochs consecutive epochs. The weights of the epoch with the lowest
    validation loss are restored at the end. With an empty validation set the
    training loss is monitored instead.

    Args:
        model: Network, trained in place
        train: Training set (non-empty unless max_epochs is 0)
        val: Validation set
        tcfg: Training configuration
        verbose: Verbosity level (0=silent, 1=per-epoch lines, 2=per-batch detail)

    Returns:
        TrainReport
    """
    report = TrainReport()
    if tcfg.max_epochs == 0:
        return report

    _check_dataset(model, train, 'Training')
    _check_dataset(model, val, 'Validation')
    if len(train) == 0:
        raise ShapeMismatchError("Cannot train on an empty dataset")

    x_train, y_train = train.images_array(), train.labels_array()
    x_val, y_val = val.images_array(), val.labels_array()
    n = len(x_train)
    optimizer = SGD(tcfg.momentum)

    if verbose >= 1:
        print(f"Training on {n} images ({len(x_val)} validation), up to {tcfg.max_epochs} epochs, "
              f"lr={tcfg.learning_rate}, batch={tcfg.batch_size}")

    best_params = model.get_parameters()
    previous = None
    flat_epochs = 0

    for epoch in range(1, tcfg.max_epochs + 1):
        order = derive_rng(tcfg.seed, 'epoch', epoch).permutation(n)
        total = 0.0
        for step, start in enumerate(range(0, n, tcfg.batch_size)):
            idx = order[start:start + tcfg.batch_size]
            loss = train_step(model, x_train[idx], y_train[idx], tcfg.learning_rate, optimizer)
            total += loss * len(idx)
            if verbose >= 2:
                print(f"    epoch {epoch} batch {step + 1}: loss {loss:.5f}")
        train_loss = total / n

        if len(x_val):
            val_loss, val_hamming = evaluate_loss(model, x_val, y_val, tcfg.batch_size)
        else:
            val_loss, val_hamming = train_loss, float('nan')
        if not np.isfinite(val_loss):
            raise DivergenceError(f"Validation loss became non-finite at epoch {epoch}")

        report.epochs.append(EpochRecord(epoch, train_loss, val_loss, val_hamming))
        if val_loss < report.best_val_loss:
            report.best_val_loss = val_loss
            report.best_epoch = epoch
            best_params = model.get_parameters()

        if verbose >= 1:
            print(f"  Epoch {epoch:3d}/{tcfg.max_epochs}: train {train_loss:.5f}  "
                  f"val {val_loss:.5f}  hamming {val_hamming:.4f}")

        if previous is not None and abs(val_loss - previous) <= tcfg.loss_tolerance:
            flat_epochs += 1
        else:
            flat_epochs = 0
        previous = val_loss

        if flat_epochs >= tcfg.patience_epochs:
            report.stop_reason = STOP_EARLY
            break

    model.set_parameters(best_params)

    if verbose >= 1:
        print(f"\nStopped after {report.n_epochs} epochs ({report.stop_reason}); "
              f"restored epoch {report.best_epoch} weights\n")
    return report


def print_train_report(report: TrainReport):
    """Pretty print a training history."""
    print("=" * 60)
    print("TRAINING REPORT")
    print("=" * 60)
    if not report.epochs:
        print("  No epochs run")
        return

    print(f"  {'Epoch':>5}  {'Train loss':>11}  {'Val loss':>11}  {'Val Hamming':>11}")
    for record in report.epochs:
        marker = ' *' if record.epoch == report.best_epoch else ''
        print(f"  {record.epoch:5d}  {record.train_loss:11.5f}  {record.val_loss:11.5f}  "
              f"{record.val_hamming:11.4f}{marker}")
    print("-" * 60)
    print(f"  Stop reason: {report.stop_reason}")
    print(f"  Best epoch:  {report.best_epoch} (val loss {report.best_val_loss:.5f})")
