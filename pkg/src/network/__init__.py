"""MDNN network: layers, model, loss, training and checkpoints."""

from .checkpoint import load_checkpoint, save_checkpoint
from .inference import predict_labels, predict_scores, threshold_scores
from .layers import Conv2d, Dense, GlobalAvgPool, MaxPool2d, ReLU, Sigmoid
from .loss import bce_loss
from .model import (
    MDNN,
    ModelConfig,
    build_model,
    count_parameters,
    flatten_head_parameter_count,
    forward,
    gap_head_parameter_count,
)
from .training import SGD, TrainConfig, TrainReport, fit, print_train_report, train_step

__all__ = [
    'Conv2d',
    'Dense',
    'GlobalAvgPool',
    'MDNN',
    'MaxPool2d',
    'ModelConfig',
    'ReLU',
    'SGD',
    'Sigmoid',
    'TrainConfig',
    'TrainReport',
    'bce_loss',
    'build_model',
    'count_parameters',
    'fit',
    'flatten_head_parameter_count',
    'forward',
    'gap_head_parameter_count',
    'load_checkpoint',
    'predict_labels',
    'predict_scores',
    'print_train_report',
    'save_checkpoint',
    'threshold_scores',
    'train_step',
]
