"""NumPy layers with explicit forward/backward passes.

Tensors are NCHW float64 arrays. With cache=True a layer keeps what its
backward pass needs; backward fills `grads` with the same keys as `params`.
Forward with cache=False touches no layer state, so several threads may run
inference on one model.
"""

from typing import Dict

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import expit

from src.errors import ShapeMismatchError


class Layer:
    """Base layer without parameters."""

    kind = 'layer'

    def __init__(self):
        self.params: Dict[str, np.ndarray] = {}
        self.grads: Dict[str, np.ndarray] = {}

    def forward(self, x: np.ndarray, cache: bool = True) -> np.ndarray:
        raise NotImplementedError

    def backward(self, dout: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def output_shape(self, input_shape):
        """Per-sample output shape for a per-sample input shape."""
        return input_shape

    def __repr__(self) -> str:
        return f"{type(self).__name__}()"


class Conv2d(Layer):
    """Stride-1 convolution with same padding (odd square kernel)."""

    kind = 'conv'

    def __init__(self, in_channels: int, out_channels: int, kernel_size: int,
                 rng: np.random.Generator):
        super().__init__()
        if kernel_size % 2 != 1:
            raise ShapeMismatchError(f"Same-padding convolution needs an odd kernel, got {kernel_size}")
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.kernel_size = kernel_size
        self.pad = kernel_size // 2

        fan_in = in_channels * kernel_size * kernel_size
        self.params['weight'] = rng.normal(0.0, np.sqrt(2.0 / fan_in),
                                           (out_channels, in_channels, kernel_size, kernel_size))
        self.params['bias'] = np.zeros(out_channels)
        self._windows = None

    def _padded_windows(self, x: np.ndarray) -> np.ndarray:
        p = self.pad
        padded = np.pad(x, ((0, 0), (0, 0), (p, p), (p, p)))
        k = self.kernel_size
        # (N, C, H, W, k, k)
        return sliding_window_view(padded, (k, k), axis=(2, 3))

    def forward(self, x: np.ndarray, cache: bool = True) -> np.ndarray:
        if x.ndim != 4 or x.shape[1] != self.in_channels:
            raise ShapeMismatchError(
                f"Conv2d expects (N, {self.in_channels}, H, W), got {x.shape}"
            )
        windows = self._padded_windows(x)
        if cache:
            self._windows = windows
        out = np.tensordot(windows, self.params['weight'], axes=([1, 4, 5], [1, 2, 3]))
        return out.transpose(0, 3, 1, 2) + self.params['bias'][None, :, None, None]

    def backward(self, dout: np.ndarray) -> np.ndarray:
        self.grads['weight'] = np.tensordot(dout, self._windows, axes=([0, 2, 3], [0, 2, 3]))
        self.grads['bias'] = dout.sum(axis=(0, 2, 3))

        flipped = self.params['weight'][:, :, ::-1, ::-1]
        dx = np.tensordot(self._padded_windows(dout), flipped, axes=([1, 4, 5], [0, 2, 3]))
        return dx.transpose(0, 3, 1, 2)

    def output_shape(self, input_shape):
        _, height, width = input_shape
        return (self.out_channels, height, width)

    def __repr__(self) -> str:
        k = self.kernel_size
        return f"Conv2d({self.in_channels}->{self.out_channels}, {k}x{k})"


class ReLU(Layer):
    kind = 'relu'

    def __init__(self):
        super().__init__()
        self._mask = None

    def forward(self, x: np.ndarray, cache: bool = True) -> np.ndarray:
        mask = x > 0
        if cache:
            self._mask = mask
        return np.where(mask, x, 0.0)

    def backward(self, dout: np.ndarray) -> np.ndarray:
        return np.where(self._mask, dout, 0.0)


class MaxPool2d(Layer):
    """2x2 max pooling, stride 2. Ties go to the first position in row-major order."""

    kind = 'maxpool'

    def __init__(self, pool_size: int = 2):
        super().__init__()
        self.pool_size = pool_size
        self._argmax = None
        self._input_shape = None

    def _blocks(self, x: np.ndarray) -> np.ndarray:
        n, c, h, w = x.shape
        s = self.pool_size
        return (x.reshape(n, c, h // s, s, w // s, s)
                 .transpose(0, 1, 2, 4, 3, 5)
                 .reshape(n, c, h // s, w // s, s * s))

    def forward(self, x: np.ndarray, cache: bool = True) -> np.ndarray:
        s = self.pool_size
        if x.ndim != 4 or x.shape[2] % s or x.shape[3] % s:
            raise ShapeMismatchError(f"MaxPool2d({s}) needs spatial sizes divisible by {s}, got {x.shape}")
        blocks = self._blocks(x)
        argmax = np.argmax(blocks, axis=-1)
        if cache:
            self._input_shape = x.shape
            self._argmax = argmax
        return np.take_along_axis(blocks, argmax[..., None], axis=-1)[..., 0]

    def backward(self, dout: np.ndarray) -> np.ndarray:
        n, c, h, w = self._input_shape
        s = self.pool_size
        routed = np.zeros((n, c, h // s, w // s, s * s))
        np.put_along_axis(routed, self._argmax[..., None], dout[..., None], axis=-1)
        return (routed.reshape(n, c, h // s, w // s, s, s)
                      .transpose(0, 1, 2, 4, 3, 5)
                      .reshape(n, c, h, w))

    def output_shape(self, input_shape):
        channels, height, width = input_shape
        s = self.pool_size
        if height % s or width % s:
            raise ShapeMismatchError(
                f"MaxPool2d({s}) receives {height}x{width}, which is not divisible by {s}"
            )
        return (channels, height // s, width // s)


class GlobalAvgPool(Layer):
    """Mean over each channel's spatial map: (N, C, H, W) -> (N, C)."""

    kind = 'gap'

    def __init__(self):
        super().__init__()
        self._spatial = None

    def forward(self, x: np.ndarray, cache: bool = True) -> np.ndarray:
        if cache:
            self._spatial = x.shape[2:]
        return x.mean(axis=(2, 3))

    def backward(self, dout: np.ndarray) -> np.ndarray:
        h, w = self._spatial
        return np.broadcast_to(dout[:, :, None, None] / (h * w),
                               dout.shape + (h, w)).copy()

    def output_shape(self, input_shape):
        return (input_shape[0],)


class Dense(Layer):
    kind = 'dense'

    def __init__(self, in_features: int, out_features: int, rng: np.random.Generator):
        super().__init__()
        self.in_features = in_features
        self.out_features = out_features
        self.params['weight'] = rng.normal(0.0, np.sqrt(2.0 / in_features), (in_features, out_features))
        self.params['bias'] = np.zeros(out_features)
        self._x = None

    def forward(self, x: np.ndarray, cache: bool = True) -> np.ndarray:
        if x.ndim != 2 or x.shape[1] != self.in_features:
            raise ShapeMismatchError(f"Dense expects (N, {self.in_features}), got {x.shape}")
        if cache:
            self._x = x
        return x @ self.params['weight'] + self.params['bias']

    def backward(self, dout: np.ndarray) -> np.ndarray:
        self.grads['weight'] = self._x.T @ dout
        self.grads['bias'] = dout.sum(axis=0)
        return dout @ self.params['weight'].T

    def output_shape(self, input_shape):
        return (self.out_features,)

    def __repr__(self) -> str:
        return f"Dense({self.in_features}->{self.out_features})"


class Sigmoid(Layer):
    kind = 'sigmoid'

    def __init__(self):
        super().__init__()
        self._out = None

    def forward(self, x: np.ndarray, cache: bool = True) -> np.ndarray:
        out = expit(x)
        if cache:
            self._out = out
        return out

    def backward(self, dout: np.ndarray) -> np.ndarray:
        return dout * self._out * (1.0 - self._out)
