"""Batched inference and thresholding."""

from typing import Sequence, Tuple, Union

import numpy as np

import config
from src.models.label import MixtureLabel
from src.network.model import MDNN, as_batch
from src.transforms.maps import ScaleImage

ImageInput = Union[np.ndarray, Sequence[ScaleImage]]


def _to_array(images: ImageInput) -> np.ndarray:
    if isinstance(images, np.ndarray):
        return images
    return np.stack([image.pixels for image in images])


def predict_scores(model: MDNN, images: ImageInput, batch_size: int = config.BATCH_SIZE) -> np.ndarray:
    """Per-label scores for many images.

    Args:
        model: Trained network (left untouched, safe to share across threads)
        images: (N, H, W) / (N, 1, H, W) array or a sequence of ScaleImages
        batch_size: Images per forward pass

    Returns:
        (N, n_labels) scores in (0, 1)
    """
    batch = as_batch(model, _to_array(images))
    if batch_size < 1:
        raise ValueError(f"batch_size must be >= 1, got {batch_size}")
    if len(batch) == 0:
        return np.zeros((0, model.config.n_labels))
    return np.concatenate([model.forward(batch[start:start + batch_size], cache=False)
                           for start in range(0, len(batch), batch_size)])


def threshold_scores(scores: np.ndarray, threshold: float = config.DEFAULT_THRESHOLD) -> np.ndarray:
    """Boolean predictions: label j is present iff score_j >= threshold."""
    return np.asarray(scores) >= threshold


def predict_labels(
    model: MDNN,
    image: Union[ScaleImage, np.ndarray],
    threshold: float = config.DEFAULT_THRESHOLD
) -> Tuple[MixtureLabel, np.ndarray]:
    """Predicted substance set and score vector for one image.

    The predicted set may be empty (threshold above every score).
    """
    pixels = image.pixels if isinstance(image, ScaleImage) else np.asarray(image)
    scores = predict_scores(model, pixels[None, ...])[0]
    return MixtureLabel(tuple(threshold_scores(scores, threshold))), scores
