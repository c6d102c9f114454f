"""Resampling of time-frequency maps into fixed-size [0, 1] images."""

import numpy as np
from scipy import ndimage

import config
from src.errors import ShapeMismatchError
from src.models.label import MixtureLabel
from src.transforms.maps import ScaleImage, TFMap


def resize_bilinear(values: np.ndarray, height: int, width: int) -> np.ndarray:
    """Bilinear resize with corner samples aligned to corner samples."""
    values = np.asarray(values, dtype=float)
    if height < 2 or width < 2:
        raise ValueError(f"Target image must be at least 2x2, got {height}x{width}")
    h, w = values.shape
    if h == 0 or w == 0:
        raise ShapeMismatchError(f"Cannot resize an empty map of shape {values.shape}")

    rows = np.linspace(0.0, h - 1, height)
    cols = np.linspace(0.0, w - 1, width)
    grid = np.meshgrid(rows, cols, indexing='ij')
    return ndimage.map_coordinates(values, grid, order=1, mode='nearest')


def min_max_normalize(values: np.ndarray) -> np.ndarray:
    """Map to [0, 1]; a constant array maps to zeros."""
    values = np.asarray(values, dtype=float)
    lo, hi = values.min(), values.max()
    if hi - lo <= 0:
        return np.zeros_like(values)
    return np.clip((values - lo) / (hi - lo), 0.0, 1.0)


def to_scale_image(
    tfmap: TFMap,
    label: MixtureLabel,
    height: int = config.IMAGE_HEIGHT,
    width: int = config.IMAGE_WIDTH
) -> ScaleImage:
    """Resize a map to height x width and normalize it to [0, 1].

    Args:
        tfmap: Transform output
        label: Label carried by the image
        height: Output rows (>= 2)
        width: Output columns (>= 2)

    Returns:
        ScaleImage whose pixels span exactly [0, 1] unless the map is constant
    """
    resized = resize_bilinear(tfmap.values, height, width)
    if np.ptp(tfmap.values) == 0:
        return ScaleImage(np.zeros_like(resized), tfmap.kind, label)
    return ScaleImage(min_max_normalize(resized), tfmap.kind, label)
