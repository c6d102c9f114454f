"""MDNN: convolutional feature modules, global average pooling and a sigmoid head.

Layer sequence for the default configuration:

    [Conv3x3 + ReLU] x convs_per_module[m], MaxPool 2x2     for each module m
    GlobalAvgPool
    [Dense + ReLU] x len(dense_units)
    Dense(n_labels), Sigmoid
"""

from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

import config
from src.errors import ShapeMismatchError
from src.network.layers import Conv2d, Dense, GlobalAvgPool, Layer, MaxPool2d, ReLU, Sigmoid


@dataclass
class ModelConfig:
    """Network architecture.

    Attributes:
        input_hw: (H, W) of input images; both divisible by 2 ** n_modules
        convs_per_module: Convolutions in each feature module
        filters_per_module: Output channels of each module's convolutions
        dense_units: Hidden dense widths after global average pooling
        n_labels: Output labels (sigmoid units)
        kernel_size: Convolution kernel side (fixed at 3)
        pool_size: Max-pool window side (fixed at 2)
    """
    input_hw: Tuple[int, int] = (config.IMAGE_HEIGHT, config.IMAGE_WIDTH)
    convs_per_module: List[int] = field(default_factory=lambda: list(config.CONVS_PER_MODULE))
    filters_per_module: List[int] = field(default_factory=lambda: list(config.FILTERS_PER_MODULE))
    dense_units: List[int] = field(default_factory=lambda: list(config.DENSE_UNITS))
    n_labels: int = len(config.SUBSTANCE_ORDER)
    kernel_size: int = config.KERNEL_SIZE
    pool_size: int = config.POOL_SIZE

    def __post_init__(self):
        self.input_hw = tuple(int(v) for v in self.input_hw)
        self.convs_per_module = [int(v) for v in self.convs_per_module]
        self.filters_per_module = [int(v) for v in self.filters_per_module]
        self.dense_units = [int(v) for v in self.dense_units]

        if len(self.input_hw) != 2:
            raise ShapeMismatchError(f"input_hw must be (H, W), got {self.input_hw}")
        if self.kernel_size != 3:
            raise ValueError(f"Kernel size is fixed at 3, got {self.kernel_size}")
        if self.pool_size != 2:
            raise ValueError(f"Pool size is fixed at 2, got {self.pool_size}")
        if not self.convs_per_module:
            raise ValueError("Model needs at least one feature module")
        if len(self.convs_per_module) != len(self.filters_per_module):
            raise ValueError(
                f"convs_per_module has {len(self.convs_per_module)} modules but "
                f"filters_per_module has {len(self.filters_per_module)}"
            )
        if any(v < 1 for v in self.convs_per_module + self.filters_per_module + self.dense_units):
            raise ValueError("Convolution counts, filter counts and dense widths must all be >= 1")
        if self.n_labels < 1:
            raise ValueError(f"n_labels must be >= 1, got {self.n_labels}")

        # Shape chain: each pooling stage halves both sides
        height, width = self.input_hw
        for module in range(self.n_modules):
            if height % self.pool_size or width % self.pool_size or height < 2 or width < 2:
                raise ShapeMismatchError(
                    f"Pool of module {module + 1} receives {height}x{width}; input sides must be "
                    f"divisible by {self.pool_size ** self.n_modules}"
                )
            height //= self.pool_size
            width //= self.pool_size

    @property
    def n_modules(self) -> int:
        return len(self.convs_per_module)

    @property
    def feature_hw(self) -> Tuple[int, int]:
        """Spatial size entering global average pooling."""
        scale = self.pool_size ** self.n_modules
        return (self.input_hw[0] // scale, self.input_hw[1] // scale)

    def to_dict(self) -> Dict:
        data = asdict(self)
        data['input_hw'] = list(self.input_hw)
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> 'ModelConfig':
        return cls(**data)


class MDNN:
    """Sequential multi-label network."""

    def __init__(self, model_config: ModelConfig, layers: List[Layer], seed: int):
        self.config = model_config
        self.layers = layers
        self.seed = seed

    def __repr__(self) -> str:
        return f"MDNN({len(self.layers)} layers, {count_parameters(self):,} parameters)"

    def forward(self, x: np.ndarray, cache: bool = True) -> np.ndarray:
        """Probabilities (N, n_labels); with cache=True activations are kept for backward."""
        for layer in self.layers:
            x = layer.forward(x, cache)
        return x

    def backward_from_logits(self, grad_logits: np.ndarray) -> np.ndarray:
        """Backpropagate a gradient taken w.r.t. the pre-sigmoid logits."""
        grad = grad_logits
        for layer in reversed(self.layers[:-1]):
            grad = layer.backward(grad)
        return grad

    def parameters(self):
        """Yield (layer_index, name, array) in layer order."""
        for index, layer in enumerate(self.layers):
            for name, array in layer.params.items():
                yield index, name, array

    def gradients(self):
        for index, layer in enumerate(self.layers):
            for name in layer.params:
                yield index, name, layer.grads[name]

    def get_parameters(self) -> List[np.ndarray]:
        return [array.copy() for _, _, array in self.parameters()]

    def set_parameters(self, arrays: List[np.ndarray]):
        targets = list(self.parameters())
        if len(arrays) != len(targets):
            raise ShapeMismatchError(f"Expected {len(targets)} parameter arrays, got {len(arrays)}")
        for (index, name, current), new in zip(targets, arrays):
            new = np.asarray(new, dtype=float)
            if new.shape != current.shape:
                raise ShapeMismatchError(
                    f"Layer {index} {name}: expected shape {current.shape}, got {new.shape}"
                )
            self.layers[index].params[name] = new.copy()

    def summary(self) -> str:
        lines = []
        shape = (1,) + tuple(self.config.input_hw)
        for index, layer in enumerate(self.layers):
            shape = layer.output_shape(shape)
            n_params = sum(a.size for a in layer.params.values())
            lines.append(f"  {index:2d}. {layer!r:<24} -> {str(shape):<16} {n_params:>8,}")
        lines.append(f"  Total parameters: {count_parameters(self):,}")
        return '\n'.join(lines)


def build_model(model_config: Optional[ModelConfig] = None, seed: int = config.RANDOM_SEED) -> MDNN:
    """Construct an MDNN with He-initialized weights and zero biases.

    Args:
        model_config: Architecture (defaults from config.py if None)
        seed: Initialization seed; the same seed gives identical weights

    Returns:
        MDNN ready for training
    """
    model_config = model_config or ModelConfig()
    rng = np.random.default_rng(seed)
    k = model_config.kernel_size

    layers: List[Layer] = []
    channels = 1
    for n_convs, filters in zip(model_config.convs_per_module, model_config.filters_per_module):
        for _ in range(n_convs):
            layers.append(Conv2d(channels, filters, k, rng))
            layers.append(ReLU())
            channels = filters
        layers.append(MaxPool2d(model_config.pool_size))

    layers.append(GlobalAvgPool())
    width = channels
    for units in model_config.dense_units:
        layers.append(Dense(width, units, rng))
        layers.append(ReLU())
        width = units
    layers.append(Dense(width, model_config.n_labels, rng))
    layers.append(Sigmoid())

    shape = (1,) + model_config.input_hw
    for layer in layers:
        shape = layer.output_shape(shape)
    if shape != (model_config.n_labels,):
        raise ShapeMismatchError(f"Shape chain ends at {shape}, expected ({model_config.n_labels},)")

    return MDNN(model_config, layers, seed)


def as_batch(model: MDNN, images: np.ndarray) -> np.ndarray:
    """Accept (N, H, W) or (N, 1, H, W) and return float64 (N, 1, H, W)."""
    images = np.asarray(images, dtype=float)
    if images.ndim == 3:
        images = images[:, None, :, :]
    expected = (1,) + tuple(model.config.input_hw)
    if images.ndim != 4 or images.shape[1:] != expected:
        raise ShapeMismatchError(
            f"Batch shape {images.shape} does not match model input (N, {expected[0]}, "
            f"{expected[1]}, {expected[2]})"
        )
    return images


def forward(model: MDNN, batch: np.ndarray) -> np.ndarray:
    """Per-label probabilities for a batch of images.

    Args:
        model: Network
        batch: (N, H, W) or (N, 1, H, W) images matching model.config.input_hw

    Returns:
        (N, n_labels) array of values in (0, 1)
    """
    return model.forward(as_batch(model, batch))


def count_parameters(model: MDNN) -> int:
    return int(sum(array.size for _, _, array in model.parameters()))


def _head_parameter_count(n_inputs: int, model_config: ModelConfig) -> int:
    total = 0
    width = n_inputs
    for units in model_config.dense_units + [model_config.n_labels]:
        total += width * units + units
        width = units
    return total


def gap_head_parameter_count(model_config: ModelConfig) -> int:
    """Dense-stack parameters when features are global-average pooled."""
    return _head_parameter_count(model_config.filters_per_module[-1], model_config)


def flatten_head_parameter_count(model_config: ModelConfig) -> int:
    """Dense-stack parameters if the final feature maps were flattened instead of pooled."""
    height, width = model_config.feature_hw
    return _head_parameter_count(model_config.filters_per_module[-1] * height * width, model_config)
